use alloc::string::String;
use alloc::vec::Vec;

use super::Span;
use crate::linalg::ComplexScalar;
use crate::quantum::{ConfigKind, OutcomeLabel};

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    pub systems: Vec<SystemDecl>,
    pub structures: Vec<StructureDecl>,
    pub configurations: Vec<ConfigDecl>,
    pub bridges: Vec<BridgeDecl>,
    pub statements: Vec<Statement>,
}

/// `system ID dim N (= A x B ...)?`
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDecl {
    pub id: Ident,
    pub dim: usize,
    /// Factor systems of a composite, in tensor order. Empty for atomic systems.
    pub factors: Vec<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinCall {
    pub name: Ident,
    pub args: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StructureSource {
    Builtin(BuiltinCall),
    Vector(Vec<ComplexScalar>),
    Matrix(Vec<Vec<ComplexScalar>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureDecl {
    pub id: Ident,
    pub over: Ident,
    pub source: StructureSource,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectRow {
    pub label: OutcomeLabel,
    pub matrix: Vec<Vec<ComplexScalar>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigSource {
    Builtin(BuiltinCall),
    Table { kind: ConfigKind, effects: Vec<EffectRow> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDecl {
    pub id: Ident,
    pub over: Ident,
    pub source: ConfigSource,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BridgeKind {
    Physical,
    Epistemic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OutcomePattern {
    /// `_`
    Any,
    Label(OutcomeLabel),
}

impl OutcomePattern {
    pub fn matches(&self, label: &OutcomeLabel) -> bool {
        match self {
            OutcomePattern::Any => true,
            OutcomePattern::Label(l) => l == label,
        }
    }
}

/// `(o1, o2, ...) -> target`
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeMapping {
    pub key: Vec<OutcomePattern>,
    pub target: OutcomeLabel,
    pub span: Span,
}

/// `bridge ID physical|epistemic via CONFIG { mappings }`
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeDecl {
    pub id: Ident,
    pub kind: BridgeKind,
    pub config: Ident,
    pub maps: Vec<BridgeMapping>,
    pub span: Span,
}

/// The system an outcome is predicated of: `sys` or `composite.factor`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub system: Ident,
    pub factor: Option<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRef {
    pub label: OutcomeLabel,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClaimKind {
    /// `yields(subject, config) = outcome`; without a config this is the
    /// intrinsic form `yields(subject) = outcome`.
    Yields { subject: Subject, config: Option<Ident>, outcome: OutcomeRef },
    /// `compose { claims } (using bridge)?`
    Compose { children: Vec<Claim>, bridge: Option<Ident> },
    /// `joint(subject, c1, c2)`
    Joint { subject: Subject, first: Ident, second: Ident },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Yields,
    IntrinsicYields,
    Composite,
    JointRequest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub kind: ClaimKind,
    pub span: Span,
}

impl Claim {
    pub fn node_kind(&self) -> NodeKind {
        match &self.kind {
            ClaimKind::Yields { config: Some(_), .. } => NodeKind::Yields,
            ClaimKind::Yields { config: None, .. } => NodeKind::IntrinsicYields,
            ClaimKind::Compose { .. } => NodeKind::Composite,
            ClaimKind::Joint { .. } => NodeKind::JointRequest,
        }
    }

    /// Every node in this claim, parents before children.
    pub fn walk<'a>(&'a self, out: &mut Vec<&'a Claim>) {
        out.push(self);
        if let ClaimKind::Compose { children, .. } = &self.kind {
            for c in children {
                c.walk(out);
            }
        }
    }
}

/// `statement ID { claim }`
#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub id: Ident,
    pub claim: Claim,
    pub span: Span,
}

impl Scenario {
    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
            && self.structures.is_empty()
            && self.configurations.is_empty()
            && self.bridges.is_empty()
            && self.statements.is_empty()
    }

    pub fn system(&self, id: &str) -> Option<&SystemDecl> {
        self.systems.iter().find(|s| s.id.name == id)
    }

    pub fn structure(&self, id: &str) -> Option<&StructureDecl> {
        self.structures.iter().find(|s| s.id.name == id)
    }

    pub fn configuration(&self, id: &str) -> Option<&ConfigDecl> {
        self.configurations.iter().find(|s| s.id.name == id)
    }

    pub fn bridge(&self, id: &str) -> Option<&BridgeDecl> {
        self.bridges.iter().find(|s| s.id.name == id)
    }

    pub fn statement(&self, id: &str) -> Option<&Statement> {
        self.statements.iter().find(|s| s.id.name == id)
    }

    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Scenario {
        let mut s = self.clone();
        s.clear_spans();
        s
    }

    fn clear_spans(&mut self) {
        let z = Span::default();
        for d in &mut self.systems {
            d.span = z;
            d.id.span = z;
            d.factors.iter_mut().for_each(|f| f.span = z);
        }
        for d in &mut self.structures {
            d.span = z;
            d.id.span = z;
            d.over.span = z;
            if let StructureSource::Builtin(b) = &mut d.source {
                b.name.span = z;
            }
        }
        for d in &mut self.configurations {
            d.span = z;
            d.id.span = z;
            d.over.span = z;
            match &mut d.source {
                ConfigSource::Builtin(b) => b.name.span = z,
                ConfigSource::Table { effects, .. } => effects.iter_mut().for_each(|e| e.span = z),
            }
        }
        for d in &mut self.bridges {
            d.span = z;
            d.id.span = z;
            d.config.span = z;
            d.maps.iter_mut().for_each(|m| m.span = z);
        }
        for d in &mut self.statements {
            d.span = z;
            d.id.span = z;
            clear_claim(&mut d.claim);
        }
    }
}

fn clear_subject(s: &mut Subject) {
    let z = Span::default();
    s.span = z;
    s.system.span = z;
    if let Some(f) = &mut s.factor {
        f.span = z;
    }
}

fn clear_claim(c: &mut Claim) {
    let z = Span::default();
    c.span = z;
    match &mut c.kind {
        ClaimKind::Yields { subject, config, outcome } => {
            clear_subject(subject);
            if let Some(cf) = config {
                cf.span = z;
            }
            outcome.span = z;
        }
        ClaimKind::Compose { children, bridge } => {
            children.iter_mut().for_each(clear_claim);
            if let Some(b) = bridge {
                b.span = z;
            }
        }
        ClaimKind::Joint { subject, first, second } => {
            clear_subject(subject);
            first.span = z;
            second.span = z;
        }
    }
}
