//! Kochen-Specker instances: unit rays grouped into orthonormal contexts, and
//! an exhaustive search for a non-contextual 0/1 value assignment.
//!
//! A coloring gives every ray 0 or 1 so that each context has exactly one 1
//! and no two orthogonal rays are both 1. Orthogonality is taken from the
//! ray vectors over the whole instance, not just within listed contexts.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::linalg::{inner, norm, ComplexScalar};

/// Unit-norm and orthogonality tolerance.
pub const TOL_KS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct KsInstance {
    pub dim: usize,
    pub rays: Vec<Vec<ComplexScalar>>,
    /// Each context lists `dim` ray indices.
    pub contexts: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct KsParseError {
    pub line: usize,
    pub message: String,
}

/// Reads the instance text format:
///
/// ```text
/// dim 3
/// ray 0 1 0 0
/// ray 1 0 0.6,0.8 0     # complex components as re,im
/// context 0 1 2
/// ```
///
/// Rays must be numbered 0, 1, 2, ... in order. `#` starts a comment.
pub fn parse_instance(text: &str) -> Result<KsInstance, KsParseError> {
    let mut dim = None;
    let mut rays = Vec::new();
    let mut contexts = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| KsParseError { line, message };
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(head) = words.next() else { continue };
        let rest: Vec<&str> = words.collect();
        match head {
            "dim" => {
                if dim.is_some() {
                    return Err(err("`dim` given twice".into()));
                }
                let [d] = rest[..] else {
                    return Err(err("expected `dim N`".into()));
                };
                let d: usize = d.parse().map_err(|_| err(format!("bad dimension `{d}`")))?;
                if d == 0 || d > crate::quantum::MAX_DIM {
                    return Err(err(format!("dimension {d} is outside 1..={}", crate::quantum::MAX_DIM)));
                }
                dim = Some(d);
            }
            "ray" => {
                if dim.is_none() {
                    return Err(err("`ray` before `dim`".into()));
                }
                let Some((idx, comps)) = rest.split_first() else {
                    return Err(err("expected `ray INDEX COMPONENTS...`".into()));
                };
                let idx: usize = idx.parse().map_err(|_| err(format!("bad ray index `{idx}`")))?;
                if idx != rays.len() {
                    return Err(err(format!("expected ray {}, found ray {idx}", rays.len())));
                }
                let v = comps
                    .iter()
                    .map(|c| parse_component(c).ok_or_else(|| err(format!("bad component `{c}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                rays.push(v);
            }
            "context" => {
                if dim.is_none() {
                    return Err(err("`context` before `dim`".into()));
                }
                let c = rest
                    .iter()
                    .map(|i| i.parse::<usize>().map_err(|_| err(format!("bad ray index `{i}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                contexts.push(c);
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    let dim = dim.ok_or(KsParseError { line: 0, message: "missing `dim` line".into() })?;
    Ok(KsInstance { dim, rays, contexts })
}

fn parse_component(s: &str) -> Option<ComplexScalar> {
    let (re, im) = match s.split_once(',') {
        Some((re, im)) => (re.parse::<f64>().ok()?, im.parse::<f64>().ok()?),
        None => (s.parse::<f64>().ok()?, 0.0),
    };
    (re.is_finite() && im.is_finite()).then_some(ComplexScalar::new(re, im))
}

impl fmt::Display for KsInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for (i, r) in self.rays.iter().enumerate() {
            write!(f, "ray {i}")?;
            for z in r {
                if z.im == 0.0 {
                    write!(f, " {}", z.re)?;
                } else {
                    write!(f, " {},{}", z.re, z.im)?;
                }
            }
            f.write_char('\n')?;
        }
        for c in &self.contexts {
            f.write_str("context")?;
            for i in c {
                write!(f, " {i}")?;
            }
            f.write_char('\n')?;
        }
        Ok(())
    }
}

/// A violated structural requirement of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum KsIssue {
    DimensionTooSmall { dim: usize },
    RayLength { ray: usize, len: usize },
    NotUnit { ray: usize, norm: f64 },
    ContextSize { context: usize, len: usize },
    UnknownRay { context: usize, ray: usize },
    NotOrthogonal { context: usize, a: usize, b: usize, overlap: f64 },
}

impl fmt::Display for KsIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KsIssue::DimensionTooSmall { dim } => write!(f, "dimension {dim} is below 3"),
            KsIssue::RayLength { ray, len } => write!(f, "ray {ray} has {len} components"),
            KsIssue::NotUnit { ray, norm } => write!(f, "ray {ray} is not a unit vector (norm {norm})"),
            KsIssue::ContextSize { context, len } => write!(f, "context {context} has {len} rays"),
            KsIssue::UnknownRay { context, ray } => write!(f, "context {context} names unknown ray {ray}"),
            KsIssue::NotOrthogonal { context, a, b, overlap } => {
                write!(f, "context {context}: rays {a} and {b} are not orthogonal (|<a|b>| = {overlap:.3e})")
            }
        }
    }
}

/// Every violated requirement: dimension at least 3, unit rays of the right
/// length, and contexts of `dim` pairwise orthogonal rays.
pub fn verify_instance(inst: &KsInstance) -> Vec<KsIssue> {
    let mut out = Vec::new();
    if inst.dim < 3 {
        out.push(KsIssue::DimensionTooSmall { dim: inst.dim });
    }
    let mut ray_ok = vec![true; inst.rays.len()];
    for (i, r) in inst.rays.iter().enumerate() {
        if r.len() != inst.dim {
            out.push(KsIssue::RayLength { ray: i, len: r.len() });
            ray_ok[i] = false;
            continue;
        }
        let n = norm(r);
        if (n - 1.0).abs() > TOL_KS {
            out.push(KsIssue::NotUnit { ray: i, norm: n });
        }
    }
    for (k, c) in inst.contexts.iter().enumerate() {
        if c.len() != inst.dim {
            out.push(KsIssue::ContextSize { context: k, len: c.len() });
        }
        for &i in c {
            if i >= inst.rays.len() {
                out.push(KsIssue::UnknownRay { context: k, ray: i });
            }
        }
        for (p, &a) in c.iter().enumerate() {
            for &b in &c[p + 1..] {
                if a < inst.rays.len() && b < inst.rays.len() && ray_ok[a] && ray_ok[b] {
                    let overlap = inner(&inst.rays[a], &inst.rays[b]).norm();
                    if overlap > TOL_KS {
                        out.push(KsIssue::NotOrthogonal { context: k, a, b, overlap });
                    }
                }
            }
        }
    }
    out
}

/// Rays orthogonal to each ray, computed from the vectors.
pub fn orthogonality(inst: &KsInstance) -> Vec<Vec<usize>> {
    let n = inst.rays.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if inst.rays[i].len() == inst.rays[j].len() && inner(&inst.rays[i], &inst.rays[j]).norm() <= TOL_KS {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj
}

/// A 0/1 value for every ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring(pub Vec<u8>);

impl Coloring {
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, v)| **v == 1).map(|(i, _)| i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorResult {
    pub colorable: bool,
    pub witness: Option<Coloring>,
    /// Branch decisions tried by the search.
    pub nodes_explored: u64,
}

const UNSET: i8 = -1;

struct Search<'a> {
    contexts: &'a [Vec<usize>],
    adj: Vec<Vec<usize>>,
    /// contexts each ray belongs to
    member: Vec<Vec<usize>>,
    nodes: u64,
}

impl Search<'_> {
    /// Sets `ray` and propagates forced values. False on contradiction.
    fn assign(&self, vals: &mut [i8], ray: usize, v: i8) -> bool {
        let mut queue = vec![(ray, v)];
        while let Some((r, v)) = queue.pop() {
            if vals[r] != UNSET {
                if vals[r] != v {
                    return false;
                }
                continue;
            }
            vals[r] = v;
            if v == 1 {
                for &o in &self.adj[r] {
                    queue.push((o, 0));
                }
                for &c in &self.member[r] {
                    for &o in &self.contexts[c] {
                        if o != r {
                            queue.push((o, 0));
                        }
                    }
                }
            } else {
                for &c in &self.member[r] {
                    let ctx = &self.contexts[c];
                    if ctx.iter().any(|&o| vals[o] == 1) {
                        continue;
                    }
                    let mut open = ctx.iter().filter(|&&o| vals[o] == UNSET);
                    match (open.next(), open.next()) {
                        (None, _) => return false,
                        (Some(&last), None) => queue.push((last, 1)),
                        _ => {}
                    }
                }
            }
        }
        true
    }

    fn solve(&mut self, vals: &mut Vec<i8>) -> bool {
        let Some(next) = vals.iter().position(|&v| v == UNSET) else {
            return true;
        };
        for v in [1, 0] {
            self.nodes += 1;
            let mut trial = vals.clone();
            if self.assign(&mut trial, next, v) && self.solve(&mut trial) {
                *vals = trial;
                return true;
            }
        }
        false
    }
}

/// Exhaustive backtracking search with unit propagation. Rays are decided in
/// ascending index order, trying 1 before 0, so the result and node count
/// are deterministic.
///
/// The instance should pass [`verify_instance`]; context indices out of
/// range are ignored.
pub fn color(inst: &KsInstance) -> ColorResult {
    let n = inst.rays.len();
    let contexts: Vec<Vec<usize>> =
        inst.contexts.iter().map(|c| c.iter().copied().filter(|&i| i < n).collect()).collect();
    let mut member = vec![Vec::new(); n];
    for (k, c) in contexts.iter().enumerate() {
        for &i in c {
            member[i].push(k);
        }
    }
    let mut search = Search { contexts: &contexts, adj: orthogonality(inst), member, nodes: 0 };
    let mut vals = vec![UNSET; n];
    // An empty context can never hold its single 1.
    let ok = contexts.iter().all(|c| !c.is_empty()) && search.solve(&mut vals);
    ColorResult {
        colorable: ok,
        witness: ok.then(|| Coloring(vals.iter().map(|&v| v as u8).collect())),
        nodes_explored: search.nodes,
    }
}

/// Checks a coloring directly against the instance, independently of the
/// search: it is total and 0/1, every context has exactly one 1, and no two
/// orthogonal rays are both 1.
pub fn verify_coloring(inst: &KsInstance, coloring: &Coloring) -> Result<(), String> {
    let v = &coloring.0;
    if v.len() != inst.rays.len() {
        return Err(format!("coloring has {} values for {} rays", v.len(), inst.rays.len()));
    }
    if let Some(i) = v.iter().position(|&x| x > 1) {
        return Err(format!("ray {i} has value {}", v[i]));
    }
    for (k, c) in inst.contexts.iter().enumerate() {
        let ones = c.iter().filter(|&&i| v.get(i) == Some(&1)).count();
        if ones != 1 {
            return Err(format!("context {k} has {ones} rays valued 1"));
        }
    }
    let ones: Vec<usize> = coloring.ones().collect();
    for (p, &a) in ones.iter().enumerate() {
        for &b in &ones[p + 1..] {
            if inner(&inst.rays[a], &inst.rays[b]).norm() <= TOL_KS {
                return Err(format!("orthogonal rays {a} and {b} are both valued 1"));
            }
        }
    }
    Ok(())
}

/// How many contexts each ray belongs to.
pub fn context_counts(inst: &KsInstance) -> Vec<usize> {
    let mut counts = vec![0; inst.rays.len()];
    for c in &inst.contexts {
        for &i in c {
            if let Some(x) = counts.get_mut(i) {
                *x += 1;
            }
        }
    }
    counts
}

/// Parity obstruction: when every ray lies in an even number of contexts
/// but the number of contexts is odd, no assignment can put exactly one 1 in
/// each context. Counting the 1s context by context would give an even total
/// equal to an odd number.
pub fn parity_obstruction(inst: &KsInstance) -> bool {
    !inst.contexts.is_empty() && inst.contexts.len() % 2 == 1 && context_counts(inst).iter().all(|c| c % 2 == 0)
}

/// Copy of `inst` without context `k`.
pub fn without_context(inst: &KsInstance, k: usize) -> KsInstance {
    let mut out = inst.clone();
    if k < out.contexts.len() {
        out.contexts.remove(k);
    }
    out
}

const CABELLO_18: &str = include_str!("../data/cabello-18.ks");
const PERES_33: &str = include_str!("../data/peres-33.ks");

pub const BUILTIN_NAMES: &[&str] = &["cabello-18", "peres-33"];

/// Bundled instance by name.
pub fn builtin(name: &str) -> Option<KsInstance> {
    let text = match name {
        "cabello-18" => CABELLO_18,
        "peres-33" => PERES_33,
        _ => return None,
    };
    Some(parse_instance(text).expect("bundled instance parses"))
}

/// Every bundled instance with its name.
pub fn builtin_instances() -> Vec<(String, KsInstance)> {
    BUILTIN_NAMES.iter().map(|n| (n.to_string(), builtin(n).expect("listed name resolves"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis3() -> KsInstance {
        parse_instance("dim 3\nray 0 1 0 0\nray 1 0 1 0\nray 2 0 0 1\ncontext 0 1 2\n").unwrap()
    }

    #[test]
    fn single_basis_is_valid_and_colorable() {
        let b = basis3();
        assert!(verify_instance(&b).is_empty());
        let r = color(&b);
        assert!(r.colorable);
        let w = r.witness.unwrap();
        assert_eq!(w.ones().count(), 1);
        assert!(verify_coloring(&b, &w).is_ok());
    }

    #[test]
    fn two_disjoint_contexts_colorable() {
        let s = "dim 3\nray 0 1 0 0\nray 1 0 1 0\nray 2 0 0 1\n\
                 ray 3 0.6 0.8 0\nray 4 -0.8 0.6 0\nray 5 0 0 -1\ncontext 0 1 2\ncontext 3 4 5\n";
        let inst = parse_instance(s).unwrap();
        assert!(verify_instance(&inst).is_empty());
        let r = color(&inst);
        assert!(r.colorable);
        assert!(verify_coloring(&inst, &r.witness.unwrap()).is_ok());
    }

    #[test]
    fn repeated_ray_is_not_orthogonal() {
        let inst = parse_instance("dim 3\nray 0 1 0 0\nray 1 0 1 0\ncontext 0 0 1\n").unwrap();
        let issues = verify_instance(&inst);
        assert_eq!(issues.len(), 1);
        assert!(issues[0].to_string().contains("not orthogonal"));
    }

    #[test]
    fn structural_issues_are_listed() {
        let inst = parse_instance("dim 3\nray 0 1 1 0\nray 1 0 1\ncontext 0 1\ncontext 0 7 1\n").unwrap();
        let issues = verify_instance(&inst);
        assert!(issues.iter().any(|i| matches!(i, KsIssue::NotUnit { ray: 0, .. })));
        assert!(issues.iter().any(|i| matches!(i, KsIssue::RayLength { ray: 1, .. })));
        assert!(issues.iter().any(|i| matches!(i, KsIssue::ContextSize { context: 0, .. })));
        assert!(issues.iter().any(|i| matches!(i, KsIssue::UnknownRay { context: 1, ray: 7 })));
    }

    #[test]
    fn complex_components_and_round_trip() {
        let inst = parse_instance("# c\ndim 3\nray 0 0.6,0.8 0 0\nray 1 0 0,1 0\nray 2 0 0 1\ncontext 0 1 2").unwrap();
        assert!(verify_instance(&inst).is_empty());
        assert_eq!(parse_instance(&inst.to_string()).unwrap(), inst);
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(parse_instance("ray 0 1").unwrap_err().line, 1);
        assert_eq!(parse_instance("dim 3\nray 1 1 0 0").unwrap_err().line, 2);
        assert_eq!(parse_instance("dim 3\n\nctx 1").unwrap_err().line, 3);
        assert!(parse_instance("").is_err());
    }

    #[test]
    fn bundled_instances() {
        let c = builtin("cabello-18").unwrap();
        assert_eq!((c.dim, c.rays.len(), c.contexts.len()), (4, 18, 9));
        let p = builtin("peres-33").unwrap();
        assert_eq!((p.dim, p.rays.len()), (3, 33));
        assert!(builtin("nope").is_none());
        for (_, inst) in builtin_instances() {
            assert!(verify_instance(&inst).is_empty());
        }
    }

    #[test]
    fn cabello_parity() {
        let c = builtin("cabello-18").unwrap();
        assert!(context_counts(&c).iter().all(|&k| k == 2));
        assert!(parity_obstruction(&c));
        let r = color(&c);
        assert!(!r.colorable && r.witness.is_none());
        assert_eq!(color(&c).nodes_explored, r.nodes_explored);
    }

    #[test]
    fn cabello_deletions_and_peres() {
        let c = builtin("cabello-18").unwrap();
        for k in 0..c.contexts.len() {
            let d = without_context(&c, k);
            let r = color(&d);
            assert!(r.colorable, "deleting context {k}");
            assert!(verify_coloring(&d, &r.witness.unwrap()).is_ok());
        }
        assert!(!color(&builtin("peres-33").unwrap()).colorable);
    }

    #[test]
    fn verifier_rejects_bad_colorings() {
        let b = basis3();
        assert!(verify_coloring(&b, &Coloring(vec![1, 1, 0])).is_err());
        assert!(verify_coloring(&b, &Coloring(vec![0, 0, 0])).is_err());
        assert!(verify_coloring(&b, &Coloring(vec![0, 1])).is_err());
        assert!(verify_coloring(&b, &Coloring(vec![0, 2, 0])).is_err());
    }
}
