use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{CheckError, Diagnostic, DiagnosticCode, Model};
use crate::lang::{self, BridgeDecl, BridgeKind, Claim, ClaimKind, Ident, Scenario, Span, Statement};
use crate::quantum::{compatible, Configuration, OutcomeLabel, MAX_DIM};

/// Judges statements against a lowered [`Model`].
pub struct Checker<'s> {
    scenario: &'s Scenario,
    model: Model,
}

/// A resolved subject: the system a configuration must act on, and the
/// atomic systems it spans.
struct Subject {
    system: String,
    atoms: Vec<String>,
}

/// A well-typed `yields(S, C) = O` reached through a composite.
struct Leaf<'a> {
    config_id: &'a str,
    config: &'a Configuration,
    atoms: Vec<String>,
    outcome: &'a OutcomeLabel,
}

fn subject_text(s: &lang::Subject) -> String {
    match &s.factor {
        Some(f) => format!("{}.{}", s.system.name, f.name),
        None => s.system.name.clone(),
    }
}

fn locate(universe: &[String], atoms: &[String]) -> Option<usize> {
    if atoms.is_empty() || atoms.len() > universe.len() {
        return None;
    }
    universe.windows(atoms.len()).position(|w| w == atoms)
}

fn tuple_text(labels: &[&OutcomeLabel]) -> String {
    let parts: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl<'s> Checker<'s> {
    /// Lowers the scenario's declarations. The returned diagnostics belong to
    /// declarations rather than statements.
    pub fn new(scenario: &'s Scenario) -> Result<(Self, Vec<Diagnostic>), CheckError> {
        let (model, diags) = Model::lower(scenario)?;
        Ok((Checker { scenario, model }, diags))
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn diag(&self, code: DiagnosticCode, message: String, span: Span, stmt: &str) -> Diagnostic {
        Diagnostic { code, message, span, statement: Some(stmt.to_string()) }
    }

    /// Every diagnostic for one statement, in no particular order.
    pub fn check_statement(&self, st: &Statement) -> Result<Vec<Diagnostic>, CheckError> {
        let mut out = Vec::new();
        self.claim(&st.claim, &st.id.name, &mut out)?;
        Ok(out)
    }

    /// Checks one claim, returning its leaves when it is well typed.
    fn claim<'a>(
        &'a self,
        c: &'a Claim,
        stmt: &str,
        out: &mut Vec<Diagnostic>,
    ) -> Result<Option<Vec<Leaf<'a>>>, CheckError> {
        match &c.kind {
            ClaimKind::Yields { subject, config: None, outcome } => {
                // Rule 1 short-circuits: nothing else is judged on this node.
                let s = subject_text(subject);
                out.push(self.diag(
                    DiagnosticCode::E001,
                    format!(
                        "ill-typed outcome predicate: `yields({s}) = {}` names no configuration; \
                         an outcome is only defined for a system under a configuration, \
                         as in `yields({s}, CONFIG)`",
                        outcome.label
                    ),
                    c.span,
                    stmt,
                ));
                Ok(None)
            }
            ClaimKind::Yields { subject, config: Some(cfg), outcome } => {
                Ok(self.yields(subject, cfg, &outcome.label, outcome.span, stmt, out).map(|l| vec![l]))
            }
            ClaimKind::Joint { .. } => {
                let d = self.check_joint_request(c, stmt);
                let ok = !d.iter().any(Diagnostic::is_error);
                out.extend(d);
                Ok(ok.then(Vec::new))
            }
            ClaimKind::Compose { children, bridge } => {
                let mut leaves = Vec::new();
                let mut children_ok = true;
                for ch in children {
                    match self.claim(ch, stmt, out)? {
                        Some(l) => leaves.extend(l),
                        None => children_ok = false,
                    }
                }
                // Composition is not judged over ill-typed children.
                if !children_ok {
                    return Ok(None);
                }
                let d = self.compose_leaves(c, &leaves, bridge.as_ref(), stmt)?;
                let ok = !d.iter().any(Diagnostic::is_error);
                out.extend(d);
                Ok(ok.then_some(leaves))
            }
        }
    }

    fn resolve_subject(&self, s: &lang::Subject, stmt: &str, out: &mut Vec<Diagnostic>) -> Option<Subject> {
        let Some(sys) = self.model.system(&s.system.name) else {
            out.push(self.diag(
                DiagnosticCode::E006,
                format!("unknown system `{}`", s.system.name),
                s.system.span,
                stmt,
            ));
            return None;
        };
        if !sys.valid {
            out.push(self.diag(
                DiagnosticCode::E007,
                format!("system `{}` has an invalid declaration", sys.id),
                s.system.span,
                stmt,
            ));
            return None;
        }
        match &s.factor {
            None => Some(Subject { system: sys.id.clone(), atoms: self.model.atoms(&sys.id) }),
            Some(f) if sys.factors.contains(&f.name) => {
                Some(Subject { system: f.name.clone(), atoms: vec![f.name.clone()] })
            }
            Some(f) => {
                let msg = if sys.factors.is_empty() {
                    format!("`{}` is not a composite system, so it has no factor `{}`", sys.id, f.name)
                } else {
                    format!("`{}` has no factor `{}`", sys.id, f.name)
                };
                out.push(self.diag(DiagnosticCode::E006, msg, f.span, stmt));
                None
            }
        }
    }

    /// Resolves a configuration reference and checks it acts on `subject`.
    fn resolve_config(
        &self,
        cfg: &'s Ident,
        subject: &Subject,
        stmt: &str,
        out: &mut Vec<Diagnostic>,
    ) -> Option<&Configuration> {
        let Some((over, value)) = self.model.configuration(&cfg.name) else {
            out.push(self.diag(DiagnosticCode::E006, format!("unknown configuration `{}`", cfg.name), cfg.span, stmt));
            return None;
        };
        let Some(value) = value else {
            out.push(self.diag(
                DiagnosticCode::E007,
                format!("configuration `{}` has an invalid declaration", cfg.name),
                cfg.span,
                stmt,
            ));
            return None;
        };
        if over != subject.system {
            out.push(self.diag(
                DiagnosticCode::E007,
                format!("configuration `{}` acts on `{over}`, but the subject is `{}`", cfg.name, subject.system),
                cfg.span,
                stmt,
            ));
            return None;
        }
        Some(value)
    }

    fn yields<'a>(
        &'a self,
        subject: &'a lang::Subject,
        cfg: &'s Ident,
        outcome: &'a OutcomeLabel,
        outcome_span: Span,
        stmt: &str,
        out: &mut Vec<Diagnostic>,
    ) -> Option<Leaf<'a>> {
        let subj = self.resolve_subject(subject, stmt, out)?;
        let config = self.resolve_config(cfg, &subj, stmt, out)?;
        if config.effect(outcome).is_none() {
            let known: Vec<String> = config.labels().map(|l| l.to_string()).collect();
            out.push(self.diag(
                DiagnosticCode::E006,
                format!("configuration `{}` has no outcome `{outcome}` (outcomes: {})", cfg.name, known.join(", ")),
                outcome_span,
                stmt,
            ));
            return None;
        }
        Some(Leaf { config_id: &cfg.name, config, atoms: subj.atoms, outcome })
    }

    /// Smallest tensor layout holding every leaf: the leaves' common system,
    /// else the first declared composite containing them all, else the
    /// product of their disjoint systems.
    fn universe(&self, leaves: &[Leaf<'_>]) -> Option<Vec<String>> {
        let first = &leaves[0].atoms;
        if leaves.iter().all(|l| l.atoms == *first) {
            return Some(first.clone());
        }
        for sys in self.model.systems() {
            if sys.valid && !sys.factors.is_empty() && leaves.iter().all(|l| locate(&sys.factors, &l.atoms).is_some()) {
                return Some(sys.factors.clone());
            }
        }
        let mut u: Vec<String> = Vec::new();
        for l in leaves {
            if locate(&u, &l.atoms).is_some() {
                continue;
            }
            if l.atoms.iter().any(|a| u.contains(a)) {
                return None;
            }
            u.extend(l.atoms.iter().cloned());
        }
        Some(u)
    }

    /// Each leaf's configuration lifted onto `universe` by identity padding.
    fn lift(&self, leaves: &[Leaf<'_>], universe: &[String], span: Span) -> Result<Vec<Configuration>, CheckError> {
        let dims: Vec<usize> = universe.iter().map(|a| self.model.atom_dim(a)).collect();
        let total = dims.iter().try_fold(1usize, |acc, d| acc.checked_mul(*d)).unwrap_or(usize::MAX);
        if total > MAX_DIM {
            return Err(CheckError::InternalLimit { dim: total, span });
        }
        leaves
            .iter()
            .map(|l| {
                let at = locate(universe, &l.atoms).expect("universe contains every leaf");
                let before: usize = dims[..at].iter().product();
                let after: usize = dims[at + l.atoms.len()..].iter().product();
                l.config
                    .embed(&[before, l.config.dim(), after], 1)
                    .map_err(|_| CheckError::InternalLimit { dim: total, span })
            })
            .collect()
    }

    fn compose_leaves(
        &self,
        node: &Claim,
        leaves: &[Leaf<'_>],
        bridge: Option<&Ident>,
        stmt: &str,
    ) -> Result<Vec<Diagnostic>, CheckError> {
        let mut clash = None;
        if leaves.len() >= 2 {
            let Some(universe) = self.universe(leaves) else {
                return Ok(vec![self.diag(
                    DiagnosticCode::E007,
                    "the subjects of this composite overlap without a declared composite system \
                     containing them all"
                        .into(),
                    node.span,
                    stmt,
                )]);
            };
            let lifted = self.lift(leaves, &universe, node.span)?;
            'outer: for i in 0..lifted.len() {
                for j in i + 1..lifted.len() {
                    if !compatible(&lifted[i], &lifted[j]).unwrap_or(false) {
                        clash = Some((i, j));
                        break 'outer;
                    }
                }
            }
        }
        Ok(match (clash, bridge) {
            (None, None) => Vec::new(),
            (None, Some(b)) => {
                let d = self.bridge_verdict(b, leaves, stmt);
                if d.is_empty() {
                    vec![self.diag(
                        DiagnosticCode::W001,
                        format!("bridge `{}` is redundant: these configurations are already compatible", b.name),
                        b.span,
                        stmt,
                    )]
                } else {
                    d
                }
            }
            (Some((i, j)), None) => vec![self.diag(
                DiagnosticCode::E002,
                format!(
                    "outcomes of incompatible configurations `{}` and `{}` are combined without a \
                     bridging interaction; add `using BRIDGE` with a physical bridge",
                    leaves[i].config_id, leaves[j].config_id
                ),
                node.span,
                stmt,
            )],
            (Some(_), Some(b)) => self.bridge_verdict(b, leaves, stmt),
        })
    }

    fn bridge_verdict(&self, b: &Ident, leaves: &[Leaf<'_>], stmt: &str) -> Vec<Diagnostic> {
        let Some(decl) = self.scenario.bridge(&b.name) else {
            return vec![self.diag(DiagnosticCode::E006, format!("unknown bridge `{}`", b.name), b.span, stmt)];
        };
        if decl.kind == BridgeKind::Epistemic {
            return vec![self.diag(
                DiagnosticCode::E003,
                format!(
                    "bridge `{}` is epistemic; only a physical interaction can license comparing \
                     these outcomes",
                    b.name
                ),
                b.span,
                stmt,
            )];
        }
        self.validate_leaves(decl, b.span, leaves, stmt)
    }

    fn validate_leaves(&self, bridge: &BridgeDecl, at: Span, leaves: &[Leaf<'_>], stmt: &str) -> Vec<Diagnostic> {
        let e004 = |msg: String, span: Span| self.diag(DiagnosticCode::E004, msg, span, stmt);
        let cfg_name = &bridge.config.name;
        let cstar = match self.model.configuration(cfg_name) {
            Some((over, Some(c))) => (over, c),
            _ => {
                return vec![e004(format!("bridge `{}` has no usable configuration `{cfg_name}`", bridge.id.name), at)]
            }
        };
        let (over, cstar) = cstar;
        let span_atoms = self.model.atoms(over);
        if let Some(l) = leaves.iter().find(|l| locate(&span_atoms, &l.atoms).is_none()) {
            return vec![e004(
                format!(
                    "wrong system: bridge `{}` acts via `{cfg_name}` on `{over}`, which does not contain `{}`",
                    bridge.id.name,
                    l.atoms.join(" x ")
                ),
                at,
            )];
        }

        let mut out = Vec::new();
        for m in &bridge.maps {
            if cstar.effect(&m.target).is_none() {
                out.push(e004(format!("unknown label: `{}` is not an outcome of `{cfg_name}`", m.target), m.span));
            }
            if m.key.len() == leaves.len() {
                for (p, l) in m.key.iter().zip(leaves) {
                    if let lang::OutcomePattern::Label(lab) = p {
                        if l.config.effect(lab).is_none() {
                            out.push(e004(
                                format!("unknown label: `{lab}` is not an outcome of `{}`", l.config_id),
                                m.span,
                            ));
                        }
                    }
                }
            }
        }

        let referenced: Vec<&OutcomeLabel> = leaves.iter().map(|l| l.outcome).collect();
        let covered = bridge
            .maps
            .iter()
            .any(|m| m.key.len() == referenced.len() && m.key.iter().zip(&referenced).all(|(p, l)| p.matches(l)));
        if !covered {
            out.push(e004(
                format!("missing mapping: bridge `{}` maps no entry for {}", bridge.id.name, tuple_text(&referenced)),
                at,
            ));
        }
        out
    }

    /// Leaves of a composite's children, or `None` when a child is ill typed.
    fn child_leaves<'a>(&'a self, node: &'a Claim, stmt: &str) -> Option<(Vec<Leaf<'a>>, Option<&'a Ident>)> {
        let ClaimKind::Compose { children, bridge } = &node.kind else {
            return None;
        };
        let mut scratch = Vec::new();
        let mut leaves = Vec::new();
        for ch in children {
            leaves.extend(self.claim(ch, stmt, &mut scratch).ok()??);
        }
        Some((leaves, bridge.as_ref()))
    }

    /// Composition verdict for a composite whose children are individually
    /// admissible. Returns nothing when a child is not.
    pub fn check_composition(&self, node: &Claim, statement: &str) -> Result<Vec<Diagnostic>, CheckError> {
        match self.child_leaves(node, statement) {
            Some((leaves, bridge)) => self.compose_leaves(node, &leaves, bridge, statement),
            None => Ok(Vec::new()),
        }
    }

    /// Checks that `bridge` licenses the comparison made by composite `node`:
    /// its configuration acts on a system holding every child subject, and
    /// its map covers the outcome tuple the node references.
    pub fn validate_bridge(&self, bridge: &BridgeDecl, node: &Claim, statement: &str) -> Vec<Diagnostic> {
        match self.child_leaves(node, statement) {
            Some((leaves, named)) => {
                let at = named.map_or(node.span, |b| b.span);
                self.validate_leaves(bridge, at, &leaves, statement)
            }
            None => Vec::new(),
        }
    }

    /// `joint(S, C1, C2)` is defined only when C1 and C2 are compatible.
    pub fn check_joint_request(&self, node: &Claim, statement: &str) -> Vec<Diagnostic> {
        let ClaimKind::Joint { subject, first, second } = &node.kind else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let Some(subj) = self.resolve_subject(subject, statement, &mut out) else {
            return out;
        };
        let a = self.resolve_config(first, &subj, statement, &mut out);
        let b = self.resolve_config(second, &subj, statement, &mut out);
        if let (Some(a), Some(b)) = (a, b) {
            if !compatible(a, b).unwrap_or(false) {
                out.push(self.diag(
                    DiagnosticCode::E005,
                    format!(
                        "category error: `{}` and `{}` do not commute, so no joint distribution over \
                         their outcomes is defined for `{}`",
                        first.name,
                        second.name,
                        subject_text(subject)
                    ),
                    node.span,
                    statement,
                ));
            }
        }
        out
    }
}
