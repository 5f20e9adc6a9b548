//! The four bundled case studies, each a scenario file with the diagnostic
//! codes every statement should receive and reference probabilities
//! computed by an independent script (`tools/expected_probabilities.py`).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::check::DiagnosticCode::{self, *};
use crate::lang::{parse, Scenario};
use crate::quantum::{OutcomeDistribution, OutcomeLabel};

const EXPECTED_TSV: &str = include_str!("../data/expected_probabilities.tsv");

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedDistribution {
    pub structure: String,
    pub config: String,
    pub distribution: OutcomeDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudy {
    pub name: &'static str,
    /// File name under which the source is written out.
    pub file_name: &'static str,
    pub source: &'static str,
    pub scenario: Scenario,
    pub expected_codes: BTreeMap<String, Vec<DiagnosticCode>>,
    pub expected_probabilities: Vec<ExpectedDistribution>,
}

fn build(
    name: &'static str,
    file_name: &'static str,
    source: &'static str,
    codes: &[(&str, &[DiagnosticCode])],
) -> CaseStudy {
    let scenario = parse(source).expect("bundled case study parses");
    CaseStudy {
        name,
        file_name,
        source,
        scenario,
        expected_codes: codes.iter().map(|(s, c)| (s.to_string(), c.to_vec())).collect(),
        expected_probabilities: expected_for(name),
    }
}

/// Rows of the reference table for one case, grouped by (structure, config)
/// in file order.
fn expected_for(case: &str) -> Vec<ExpectedDistribution> {
    let mut out: Vec<ExpectedDistribution> = Vec::new();
    let mut pending: Vec<(OutcomeLabel, f64)> = Vec::new();
    let mut key: Option<(String, String)> = None;
    let flush = |key: &mut Option<(String, String)>,
                 pending: &mut Vec<(OutcomeLabel, f64)>,
                 out: &mut Vec<ExpectedDistribution>| {
        if let Some((structure, config)) = key.take() {
            out.push(ExpectedDistribution {
                structure,
                config,
                distribution: OutcomeDistribution::from_entries(core::mem::take(pending)),
            });
        }
    };
    for line in EXPECTED_TSV.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        let [c, s, k, o, p] = f[..] else {
            panic!("reference table row has {} fields: {line}", f.len());
        };
        if c != case {
            continue;
        }
        let this = (s.to_string(), k.to_string());
        if key.as_ref() != Some(&this) {
            flush(&mut key, &mut pending, &mut out);
            key = Some(this);
        }
        let label = OutcomeLabel::parse(o).expect("reference label parses");
        pending.push((label, p.parse().expect("reference probability parses")));
    }
    flush(&mut key, &mut pending, &mut out);
    out
}

pub fn stern_gerlach() -> CaseStudy {
    build(
        "stern_gerlach",
        "stern_gerlach.icsq",
        include_str!("../examples/stern_gerlach.icsq"),
        &[
            ("intrinsic", &[E001]),
            ("z_relative", &[]),
            ("x_relative", &[]),
            ("mixed_axes", &[E002]),
            ("joint_zz", &[]),
            ("joint_zx", &[E005]),
        ],
    )
}

pub fn double_slit() -> CaseStudy {
    build(
        "double_slit",
        "double_slit.icsq",
        include_str!("../examples/double_slit.icsq"),
        &[
            ("bright_fringe", &[]),
            ("detector_hit", &[]),
            ("wave_and_particle", &[E002]),
            ("path_and_marker", &[]),
            ("joint_slit", &[E005]),
        ],
    )
}

pub fn singlet_bell() -> CaseStudy {
    build(
        "singlet_bell",
        "singlet_bell.icsq",
        include_str!("../examples/singlet_bell.icsq"),
        &[("cross_wing", &[]), ("same_wing", &[E002]), ("left_joint", &[E005]), ("records_compared", &[W001])],
    )
}

pub fn wigner_friend() -> CaseStudy {
    build(
        "wigner_friend",
        "wigner_friend.icsq",
        include_str!("../examples/wigner_friend.icsq"),
        &[
            ("friend_sees", &[]),
            ("wigner_sees", &[]),
            ("unbridged", &[E002]),
            ("deduced", &[E003]),
            ("door_opened", &[]),
        ],
    )
}

pub fn all() -> Vec<CaseStudy> {
    alloc::vec![stern_gerlach(), double_slit(), singlet_bell(), wigner_friend()]
}

pub fn by_name(name: &str) -> Option<CaseStudy> {
    all().into_iter().find(|c| c.name == name)
}
