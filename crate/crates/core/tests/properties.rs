#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use icsq_core::bell::{self, AngleSettings, CorrelationTable, JointDistribution, LhvStrategy};
use icsq_core::check::{check, CheckReport};
use icsq_core::ks;
use icsq_core::lang::*;
use icsq_core::linalg::{inner, norm, ComplexScalar, Matrix};
use icsq_core::quantum::{
    born_probabilities, builtins, compatible, sample, tensor, tensor_config, update, ConfigKind, Configuration, Effect,
    OutcomeLabel, QuantumStructure,
};
use icsq_core::scenarios;
use proptest::prelude::*;
use proptest::sample::select;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn raw_vector(dim: usize) -> impl Strategy<Value = Vec<ComplexScalar>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_map(|v| v.into_iter().map(|(r, i)| c(r, i)).collect())
}

fn unit_vector(dim: usize) -> impl Strategy<Value = Vec<ComplexScalar>> {
    raw_vector(dim).prop_filter("non-degenerate", |v| norm(v) > 0.1).prop_map(|v| {
        let n = norm(&v);
        v.into_iter().map(|z| z / n).collect()
    })
}

/// Orthonormal basis by Gram-Schmidt over random vectors.
fn basis(dim: usize) -> impl Strategy<Value = Vec<Vec<ComplexScalar>>> {
    prop::collection::vec(raw_vector(dim), dim).prop_filter_map("independent", move |vs| {
        let mut out: Vec<Vec<ComplexScalar>> = Vec::new();
        for mut v in vs {
            for u in &out {
                let p = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * y;
                }
            }
            let n = norm(&v);
            if n < 0.05 {
                return None;
            }
            out.push(v.into_iter().map(|z| z / n).collect());
        }
        Some(out)
    })
}

/// Projective configuration from a random basis, coarse-grained by a random
/// grouping of basis vectors into outcomes.
fn projective(dim: usize) -> impl Strategy<Value = Configuration> {
    (basis(dim), prop::collection::vec(0usize..dim, dim)).prop_map(move |(b, groups)| {
        let mut ops: BTreeMap<usize, Matrix> = BTreeMap::new();
        for (v, g) in b.iter().zip(groups) {
            let p = Matrix::outer(v);
            ops.entry(g).and_modify(|m| *m = m.add(&p)).or_insert(p);
        }
        let effects = ops
            .into_iter()
            .map(|(g, operator)| Effect { label: OutcomeLabel::Atom(format!("o{g}")), operator })
            .collect();
        Configuration::new("r", ConfigKind::Projective, effects).expect("projective by construction")
    })
}

fn structure(dim: usize) -> impl Strategy<Value = QuantumStructure> {
    prop_oneof![
        unit_vector(dim).prop_map(|v| QuantumStructure::pure(v).unwrap()),
        (unit_vector(dim), unit_vector(dim), 0.0f64..1.0).prop_map(|(u, v, w)| {
            let rho = Matrix::outer(&u).scale(c(w, 0.0)).add(&Matrix::outer(&v).scale(c(1.0 - w, 0.0)));
            QuantumStructure::density(rho).unwrap()
        }),
    ]
}

fn pair(dim: usize) -> impl Strategy<Value = (QuantumStructure, Configuration)> {
    (structure(dim), projective(dim))
}

fn any_pair() -> impl Strategy<Value = (QuantumStructure, Configuration)> {
    prop_oneof![pair(2), pair(3), pair(4), structure(2).prop_map(|s| (s, builtins::trine("t")))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn born_probabilities_form_a_distribution((s, cfg) in any_pair()) {
        let d = born_probabilities(&s, &cfg).unwrap();
        prop_assert!((d.total() - 1.0).abs() <= 1e-9);
        prop_assert!(d.entries().iter().all(|(_, p)| (0.0..=1.0).contains(p)));
        prop_assert_eq!(d.entries().len(), cfg.effects().len());
    }

    #[test]
    fn compatibility_is_symmetric_and_reflexive(a in projective(3), b in projective(3)) {
        prop_assert_eq!(compatible(&a, &b).unwrap(), compatible(&b, &a).unwrap());
        prop_assert!(compatible(&a, &a).unwrap());
    }

    #[test]
    fn luders_update_is_repeatable((s, cfg) in prop_oneof![pair(2), pair(3), pair(4)]) {
        let prior = born_probabilities(&s, &cfg).unwrap();
        for (label, p) in prior.entries() {
            if *p < 1e-6 {
                continue;
            }
            let post = update(&s, &cfg, label).unwrap();
            let again = born_probabilities(&post, &cfg).unwrap();
            prop_assert!((again.get(label).unwrap() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn tensor_preserves_validity((s1, c1) in pair(2), (s2, c2) in pair(3)) {
        let s = tensor(&s1, &s2).unwrap();
        let joint = tensor_config(&c1, &c2).unwrap();
        prop_assert_eq!(s.dim(), 6);
        prop_assert_eq!(joint.effects().len(), c1.effects().len() * c2.effects().len());
        let d = born_probabilities(&s, &joint).unwrap();
        prop_assert!((d.total() - 1.0).abs() <= 1e-9);
        // product statistics
        let d1 = born_probabilities(&s1, &c1).unwrap();
        let d2 = born_probabilities(&s2, &c2).unwrap();
        for (l1, p1) in d1.entries() {
            for (l2, p2) in d2.entries() {
                let p = d.get(&OutcomeLabel::pair(l1.clone(), l2.clone())).unwrap();
                prop_assert!((p - p1 * p2).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn spin_axis_matches_bloch_closed_form(
        t1 in 0.0f64..std::f64::consts::PI, p1 in -7.0f64..7.0,
        t2 in 0.0f64..std::f64::consts::PI, p2 in -7.0f64..7.0,
    ) {
        let d = born_probabilities(&builtins::spin_up(t1, p1), &builtins::spin_axis("n", t2, p2)).unwrap();
        let n = |t: f64, p: f64| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        let (a, b) = (n(t1, p1), n(t2, p2));
        let cos_angle = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let angle = cos_angle.clamp(-1.0, 1.0).acos();
        let want = (angle / 2.0).cos().powi(2);
        prop_assert!((d.get(&"up".into()).unwrap() - want).abs() <= 1e-9);
    }

    #[test]
    fn sampling_is_reproducible((s, cfg) in any_pair(), seed in any::<u64>(), n in 0u64..2000) {
        let a = sample(&s, &cfg, seed, n).unwrap();
        prop_assert_eq!(a.total(), n);
        prop_assert_eq!(a, sample(&s, &cfg, seed, n).unwrap());
    }
}

// ---- scenario language ----

const KEYWORD_SOUP: &[&str] = &[
    "system",
    "dim",
    "structure",
    "over",
    "builtin",
    "config",
    "bridge",
    "physical",
    "epistemic",
    "via",
    "statement",
    "yields",
    "compose",
    "using",
    "joint",
    "projective",
    "povm",
    "x",
    "_",
    "a",
    "pair",
    ".",
    "{",
    "}",
    "(",
    ")",
    "[",
    "]",
    ",",
    "=",
    ":",
    "->",
    "+",
    "-",
    "1",
    "0.5",
    "2i",
    "1e400",
    "#c\n",
    "\n",
    "//",
    "é",
    "\u{0}",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parser_is_total_on_text(s in ".{0,400}") {
        let _ = parse(&s);
    }

    #[test]
    fn parser_is_total_on_bytes(b in prop::collection::vec(any::<u8>(), 0..400)) {
        let _ = parse(&String::from_utf8_lossy(&b));
    }

    #[test]
    fn parser_is_total_on_token_soup(toks in prop::collection::vec(select(KEYWORD_SOUP), 0..120)) {
        let src = toks.join(" ");
        match parse(&src) {
            Ok(sc) => {
                for st in &sc.statements {
                    prop_assert!(st.span.end <= src.len());
                }
            }
            Err(errs) => {
                prop_assert!(!errs.is_empty());
                for e in &errs {
                    prop_assert!(e.span.end <= src.len() && e.span.line >= 1);
                }
            }
        }
    }
}

fn name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,5}".prop_filter("not reserved", |s| !KEYWORDS.contains(&s.as_str()))
}

fn ident() -> impl Strategy<Value = Ident> {
    name().prop_map(|name| Ident { name, span: Span::default() })
}

fn label() -> impl Strategy<Value = OutcomeLabel> {
    name()
        .prop_map(OutcomeLabel::Atom)
        .prop_recursive(2, 8, 3, |inner| prop::collection::vec(inner, 1..4).prop_map(OutcomeLabel::Tuple))
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![-10.0f64..10.0, Just(0.0), Just(-0.0), any::<f64>().prop_filter("finite", |v| v.is_finite())]
}

fn complex() -> impl Strategy<Value = ComplexScalar> {
    (real(), prop_oneof![Just(0.0), real()]).prop_map(|(r, i)| c(r, i))
}

fn matrix() -> impl Strategy<Value = Vec<Vec<ComplexScalar>>> {
    prop::collection::vec(prop::collection::vec(complex(), 1..4), 1..4)
}

fn builtin_call() -> impl Strategy<Value = BuiltinCall> {
    (ident(), prop::collection::vec(real(), 0..3)).prop_map(|(name, args)| BuiltinCall { name, args })
}

fn subject() -> impl Strategy<Value = Subject> {
    (ident(), prop::option::of(ident())).prop_map(|(system, factor)| Subject { system, factor, span: Span::default() })
}

fn claim() -> impl Strategy<Value = Claim> {
    let leaf = (subject(), prop::option::of(ident()), label()).prop_map(|(subject, config, label)| Claim {
        kind: ClaimKind::Yields { subject, config, outcome: OutcomeRef { label, span: Span::default() } },
        span: Span::default(),
    });
    leaf.prop_recursive(3, 12, 3, |inner| {
        (prop::collection::vec(inner, 2..4), prop::option::of(ident())).prop_map(|(children, bridge)| Claim {
            kind: ClaimKind::Compose { children, bridge },
            span: Span::default(),
        })
    })
}

fn top_claim() -> impl Strategy<Value = Claim> {
    prop_oneof![
        4 => claim(),
        1 => (subject(), ident(), ident()).prop_map(|(subject, first, second)| Claim {
            kind: ClaimKind::Joint { subject, first, second },
            span: Span::default(),
        }),
    ]
}

/// Unique names per namespace: the generated name with the index appended.
fn numbered(mut id: Ident, i: usize) -> Ident {
    id.name = format!("{}{i}", id.name);
    id
}

fn scenario() -> impl Strategy<Value = Scenario> {
    let z = Span::default();
    let systems =
        prop::collection::vec((ident(), 1usize..100, prop::collection::vec(ident(), 0..4)), 0..4).prop_map(move |v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (id, dim, factors))| SystemDecl {
                    id: numbered(id, i),
                    dim,
                    factors: if factors.len() == 1 { Vec::new() } else { factors },
                    span: z,
                })
                .collect::<Vec<_>>()
        });
    let source = prop_oneof![
        builtin_call().prop_map(StructureSource::Builtin),
        prop::collection::vec(complex(), 1..4).prop_map(StructureSource::Vector),
        matrix().prop_map(StructureSource::Matrix),
    ];
    let structures = prop::collection::vec((ident(), ident(), source), 0..4).prop_map(move |v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (id, over, source))| StructureDecl { id: numbered(id, i), over, source, span: z })
            .collect::<Vec<_>>()
    });
    let effect = (label(), matrix()).prop_map(move |(label, matrix)| EffectRow { label, matrix, span: z });
    let csource = prop_oneof![
        builtin_call().prop_map(ConfigSource::Builtin),
        (prop::bool::ANY, prop::collection::vec(effect, 1..3)).prop_map(|(povm, effects)| ConfigSource::Table {
            kind: if povm { ConfigKind::Povm } else { ConfigKind::Projective },
            effects,
        }),
    ];
    let configs = prop::collection::vec((ident(), ident(), csource), 0..4).prop_map(move |v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (id, over, source))| ConfigDecl { id: numbered(id, i), over, source, span: z })
            .collect::<Vec<_>>()
    });
    let pattern = prop_oneof![Just(OutcomePattern::Any), label().prop_map(OutcomePattern::Label)];
    let mapping = (prop::collection::vec(pattern, 1..3), label()).prop_map(move |(key, target)| BridgeMapping {
        key,
        target,
        span: z,
    });
    let bridges =
        prop::collection::vec((ident(), prop::bool::ANY, ident(), prop::collection::vec(mapping, 0..3)), 0..3)
            .prop_map(move |v| {
                v.into_iter()
                    .enumerate()
                    .map(|(i, (id, physical, config, maps))| BridgeDecl {
                        id: numbered(id, i),
                        kind: if physical { BridgeKind::Physical } else { BridgeKind::Epistemic },
                        config,
                        maps,
                        span: z,
                    })
                    .collect::<Vec<_>>()
            });
    let statements = prop::collection::vec((ident(), top_claim()), 0..4).prop_map(move |v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (id, claim))| Statement { id: numbered(id, i), claim, span: z })
            .collect::<Vec<_>>()
    });
    (systems, structures, configs, bridges, statements).prop_map(
        |(systems, structures, configurations, bridges, statements)| Scenario {
            systems,
            structures,
            configurations,
            bridges,
            statements,
        },
    )
}

fn claim_spans_within(c: &Claim, len: usize) -> bool {
    let mut nodes = Vec::new();
    c.walk(&mut nodes);
    nodes.iter().all(|n| n.span.start <= n.span.end && n.span.end <= len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_scenarios_round_trip(sc in scenario()) {
        let text = serialize(&sc);
        let parsed = parse(&text).map_err(|e| TestCaseError::fail(format!("{e:?}\n{text}")))?;
        prop_assert_eq!(parsed.without_spans(), sc.without_spans());
        for st in &parsed.statements {
            prop_assert!(claim_spans_within(&st.claim, text.len()));
        }
        prop_assert_eq!(serialize(&parsed), text);
    }
}

// ---- checker ----

fn verdicts(r: &CheckReport, sc: &Scenario) -> BTreeMap<String, (bool, Vec<String>)> {
    sc.statements
        .iter()
        .map(|s| {
            let codes = r.codes_for(&s.id.name).iter().map(|c| c.to_string()).collect();
            (s.id.name.clone(), (r.is_admissible(&s.id.name), codes))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_do_not_depend_on_statement_order(case in 0usize..4, seed in any::<u64>()) {
        let study = &scenarios::all()[case];
        let base = check(&study.scenario).unwrap();
        let mut shuffled = study.scenario.clone();
        let n = shuffled.statements.len();
        // Fisher-Yates with a tiny LCG keyed by the seed
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.statements.swap(i, j);
        }
        let text = serialize(&shuffled);
        let reparsed = parse(&text).unwrap();
        let permuted = check(&reparsed).unwrap();
        prop_assert_eq!(verdicts(&base, &study.scenario), verdicts(&permuted, &reparsed));
        let starts: Vec<usize> = permuted.diagnostics.iter().map(|d| d.span.start).collect();
        prop_assert!(starts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn physical_bridge_never_breaks_an_admissible_composite(a in -7.0f64..7.0, b in -7.0f64..7.0) {
        let src = format!(
            "system l dim 2\nsystem r dim 2\nsystem lr dim 4 = l x r\n\
             config ca over l builtin spin_axis({a})\nconfig cb over r builtin spin_axis({b})\n\
             config meet over lr builtin joint_spin({a}, {b})\n\
             bridge m physical via meet {{ (up, up) -> (up, up) (up, down) -> (up, down) (down, up) -> (down, up) (down, down) -> (down, down) }}\n\
             statement plain {{ compose {{ yields(lr.l, ca) = up yields(lr.r, cb) = down }} }}\n\
             statement bridged {{ compose {{ yields(lr.l, ca) = up yields(lr.r, cb) = down }} using m }}"
        );
        let r = check(&parse(&src).unwrap()).unwrap();
        prop_assert!(r.is_admissible("plain"));
        prop_assert!(r.is_admissible("bridged"));
    }

    #[test]
    fn intrinsic_claims_get_exactly_one_e001(sys in ident(), o in label()) {
        let src = format!("statement s {{ yields({}) = {o} }}", sys.name);
        let r = check(&parse(&src).unwrap()).unwrap();
        prop_assert_eq!(r.codes_for("s").iter().map(|c| c.as_str()).collect::<Vec<_>>(), vec!["E001"]);
    }
}

// ---- correlations ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn singlet_tables_are_no_signalling(a in -7.0f64..7.0, ap in -7.0f64..7.0, b in -7.0f64..7.0, bp in -7.0f64..7.0) {
        let s = AngleSettings::new(a, ap, b, bp);
        let t = CorrelationTable::from_singlet(&s);
        for x in 0..2 {
            prop_assert!((t.get(x, 0).first_marginal(0) - t.get(x, 1).first_marginal(0)).abs() <= 1e-9);
            prop_assert!((t.get(0, x).second_marginal(0) - t.get(1, x).second_marginal(0)).abs() <= 1e-9);
        }
        prop_assert!(bell::chsh_value(&s).abs() <= 2.0 * std::f64::consts::SQRT_2 + 1e-9);
        let shift = 0.37;
        let r = AngleSettings::new(a + shift, ap + shift, b + shift, bp + shift);
        prop_assert!((bell::chsh_value(&s) - bell::chsh_value(&r)).abs() <= 1e-9);
    }

    #[test]
    fn local_mixtures_embed_and_respect_chsh(w in prop::collection::vec(0.0f64..1.0, 16)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-3);
        let mut weights = [0.0; 16];
        for (k, v) in w.iter().enumerate() {
            weights[k] = v / total;
        }
        let p = bell::induced_table(&weights);
        let table = CorrelationTable::new(p).unwrap();
        prop_assert!(table.chsh().abs() <= 2.0 + 1e-12);
        let j = bell::joint_distribution_exists(&table);
        prop_assert!(j.exists);
        let back = bell::induced_table(&j.witness.unwrap());
        for x in 0..2 {
            for y in 0..2 {
                for s in 0..2 {
                    for t in 0..2 {
                        prop_assert!((back[x][y].get(s, t) - table.get(x, y).get(s, t)).abs() <= 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn malformed_tables_are_rejected(shift in 0.01f64..0.2) {
        let fair = JointDistribution([[0.25; 2]; 2]);
        let skew = JointDistribution([[0.25 + shift, 0.25 - shift], [0.25, 0.25]]);
        prop_assert!(CorrelationTable::new([[fair, skew], [fair, fair]]).is_err());
        let heavy = JointDistribution([[0.25 + shift, 0.25], [0.25, 0.25]]);
        prop_assert!(CorrelationTable::new([[heavy; 2]; 2]).is_err());
    }
}

#[test]
fn every_strategy_table_has_its_own_point_mass() {
    for g in LhvStrategy::all() {
        let j = bell::joint_distribution_exists(&CorrelationTable::from_strategy(&g));
        assert!((j.witness.unwrap()[usize::from(g.index())] - 1.0).abs() < 1e-9);
    }
}

// ---- Kochen-Specker ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witnesses_of_context_subsets_verify(which in any::<bool>(), keep in prop::collection::vec(any::<bool>(), 16)) {
        let name = if which { "cabello-18" } else { "peres-33" };
        let mut inst = ks::builtin(name).unwrap();
        inst.contexts = inst.contexts.into_iter().zip(keep.iter().cycle()).filter(|(_, k)| **k).map(|(c, _)| c).collect();
        let r = ks::color(&inst);
        prop_assert_eq!(ks::color(&inst).nodes_explored, r.nodes_explored);
        if let Some(w) = &r.witness {
            prop_assert!(ks::verify_coloring(&inst, w).is_ok());
        }
        prop_assert_eq!(r.colorable, r.witness.is_some());
    }
}
