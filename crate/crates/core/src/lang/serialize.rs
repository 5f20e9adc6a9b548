use alloc::string::String;
use core::fmt::{self, Write};

use super::ast::*;
use crate::linalg::ComplexScalar;
use crate::quantum::ConfigKind;

/// Canonical source text for a scenario. Parsing the result yields a
/// scenario structurally equal to the input.
pub fn serialize(scenario: &Scenario) -> String {
    let mut out = String::new();
    write_scenario(&mut out, scenario).expect("writing to a String cannot fail");
    out
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_scenario(f, self)
    }
}

fn write_scenario(w: &mut impl Write, sc: &Scenario) -> fmt::Result {
    for s in &sc.systems {
        write!(w, "system {} dim {}", s.id.name, s.dim)?;
        for (i, f) in s.factors.iter().enumerate() {
            w.write_str(if i == 0 { " = " } else { " x " })?;
            w.write_str(&f.name)?;
        }
        w.write_char('\n')?;
    }
    for s in &sc.structures {
        write!(w, "structure {} over {} ", s.id.name, s.over.name)?;
        match &s.source {
            StructureSource::Builtin(b) => {
                write!(w, "builtin {}", b.name.name)?;
                if !b.args.is_empty() {
                    write_args(w, &b.args)?;
                }
            }
            StructureSource::Vector(v) => write_vector(w, v)?,
            StructureSource::Matrix(m) => write_matrix(w, m)?,
        }
        w.write_char('\n')?;
    }
    for c in &sc.configurations {
        write!(w, "config {} over {} ", c.id.name, c.over.name)?;
        match &c.source {
            ConfigSource::Builtin(b) => {
                write!(w, "builtin {}", b.name.name)?;
                write_args(w, &b.args)?;
            }
            ConfigSource::Table { kind, effects } => {
                w.write_str(match kind {
                    ConfigKind::Projective => "projective {\n",
                    ConfigKind::Povm => "povm {\n",
                })?;
                for e in effects {
                    write!(w, "  {}: ", e.label)?;
                    write_matrix(w, &e.matrix)?;
                    w.write_char('\n')?;
                }
                w.write_char('}')?;
            }
        }
        w.write_char('\n')?;
    }
    for b in &sc.bridges {
        let kind = match b.kind {
            BridgeKind::Physical => "physical",
            BridgeKind::Epistemic => "epistemic",
        };
        writeln!(w, "bridge {} {} via {} {{", b.id.name, kind, b.config.name)?;
        for m in &b.maps {
            w.write_str("  (")?;
            for (i, p) in m.key.iter().enumerate() {
                if i > 0 {
                    w.write_str(", ")?;
                }
                match p {
                    OutcomePattern::Any => w.write_char('_')?,
                    OutcomePattern::Label(l) => write!(w, "{l}")?,
                }
            }
            writeln!(w, ") -> {}", m.target)?;
        }
        w.write_str("}\n")?;
    }
    for s in &sc.statements {
        write!(w, "statement {} {{ ", s.id.name)?;
        write_claim(w, &s.claim)?;
        w.write_str(" }\n")?;
    }
    Ok(())
}

fn write_subject(w: &mut impl Write, s: &Subject) -> fmt::Result {
    w.write_str(&s.system.name)?;
    if let Some(f) = &s.factor {
        write!(w, ".{}", f.name)?;
    }
    Ok(())
}

fn write_claim(w: &mut impl Write, c: &Claim) -> fmt::Result {
    match &c.kind {
        ClaimKind::Yields { subject, config, outcome } => {
            w.write_str("yields(")?;
            write_subject(w, subject)?;
            if let Some(cfg) = config {
                write!(w, ", {}", cfg.name)?;
            }
            write!(w, ") = {}", outcome.label)
        }
        ClaimKind::Compose { children, bridge } => {
            w.write_str("compose { ")?;
            for ch in children {
                write_claim(w, ch)?;
                w.write_char(' ')?;
            }
            w.write_char('}')?;
            if let Some(b) = bridge {
                write!(w, " using {}", b.name)?;
            }
            Ok(())
        }
        ClaimKind::Joint { subject, first, second } => {
            w.write_str("joint(")?;
            write_subject(w, subject)?;
            write!(w, ", {}, {})", first.name, second.name)
        }
    }
}

fn write_args(w: &mut impl Write, args: &[f64]) -> fmt::Result {
    w.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            w.write_str(", ")?;
        }
        write!(w, "{a}")?;
    }
    w.write_char(')')
}

fn write_complex(w: &mut impl Write, z: ComplexScalar) -> fmt::Result {
    if z.im == 0.0 {
        write!(w, "{}", z.re)
    } else if z.im.is_sign_negative() {
        write!(w, "{} - {}i", z.re, -z.im)
    } else {
        write!(w, "{} + {}i", z.re, z.im)
    }
}

fn write_vector(w: &mut impl Write, v: &[ComplexScalar]) -> fmt::Result {
    w.write_char('[')?;
    for (i, z) in v.iter().enumerate() {
        if i > 0 {
            w.write_str(", ")?;
        }
        write_complex(w, *z)?;
    }
    w.write_char(']')
}

fn write_matrix(w: &mut impl Write, m: &[alloc::vec::Vec<ComplexScalar>]) -> fmt::Result {
    w.write_char('[')?;
    for (i, row) in m.iter().enumerate() {
        if i > 0 {
            w.write_str(", ")?;
        }
        write_vector(w, row)?;
    }
    w.write_char(']')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn round_trip_covers_every_construct() {
        let src = "system a dim 2\nsystem b dim 2\nsystem ab dim 4 = a x b\n\
                   structure s over a [0.6, -0 - 0.8i]\n\
                   structure r over a [[0.5, 0], [0, 0.5]]\n\
                   structure t over ab builtin singlet\n\
                   structure u over a builtin spin_up(1, -2.5)\n\
                   config c over a builtin spin_axis(-1.5, 2e-1)\n\
                   config d over a povm { yes: [[1, 0], [0, 0]] (no, x): [[0, 0], [0, 1]] }\n\
                   bridge br epistemic via d { (yes, _) -> yes ((a), b) -> (no, x) }\n\
                   statement s1 { compose { yields(ab.a, c) = up compose { yields(a) = x yields(b, c) = (p, q) } } using br }\n\
                   statement s2 { joint(ab, c, d) }";
        let first = parse(src).unwrap();
        let text = serialize(&first);
        let second = parse(&text).unwrap();
        assert_eq!(first.without_spans(), second.without_spans());
        assert_eq!(text, serialize(&second));
    }
}
