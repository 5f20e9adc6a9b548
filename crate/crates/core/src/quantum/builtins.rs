//! Named states and configurations available to scenario files through the
//! `builtin` keyword.
//!
//! Spin axes use the Bloch convention: polar angle θ from +z, azimuth φ from
//! +x. `spin_axis(θ, φ)` has effects `(I ± n·σ)/2` labeled `up`/`down`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{compose, ConfigKind, Configuration, Effect, OutcomeLabel, QuantumError, QuantumStructure};
use crate::linalg::{ComplexScalar, Matrix, ONE, ZERO};

const H: f64 = core::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn phase(phi: f64) -> ComplexScalar {
    c(libm::cos(phi), libm::sin(phi))
}

fn pure(v: Vec<ComplexScalar>) -> QuantumStructure {
    QuantumStructure::pure(v).expect("builtin state is normalized")
}

fn projective(id: &str, effects: Vec<(&str, Matrix)>) -> Configuration {
    let effects = effects.into_iter().map(|(l, operator)| Effect { label: OutcomeLabel::atom(l), operator }).collect();
    Configuration::new(id, ConfigKind::Projective, effects).expect("builtin configuration is valid")
}

/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩
pub fn spin_up(theta: f64, phi: f64) -> QuantumStructure {
    pure(vec![c(libm::cos(theta / 2.0), 0.0), phase(phi) * libm::sin(theta / 2.0)])
}

pub fn up_z() -> QuantumStructure {
    pure(vec![ONE, ZERO])
}

pub fn down_z() -> QuantumStructure {
    pure(vec![ZERO, ONE])
}

pub fn up_x() -> QuantumStructure {
    pure(vec![c(H, 0.0), c(H, 0.0)])
}

/// (|01⟩ − |10⟩)/√2
pub fn singlet() -> QuantumStructure {
    pure(vec![ZERO, c(H, 0.0), c(-H, 0.0), ZERO])
}

/// (|00⟩ + |11⟩)/√2
pub fn phi_plus() -> QuantumStructure {
    pure(vec![c(H, 0.0), ZERO, ZERO, c(H, 0.0)])
}

/// (|0⟩ + e^{iφ}|1⟩)/√2: both paths open with relative phase φ.
pub fn path_superposition(phi: f64) -> QuantumStructure {
    pure(vec![c(H, 0.0), phase(phi) * H])
}

/// (|0,0⟩ + e^{iφ}|1,1⟩)/√2 over path ⊗ marker.
pub fn marked_path(phi: f64) -> QuantumStructure {
    pure(vec![c(H, 0.0), ZERO, ZERO, phase(phi) * H])
}

pub fn maximally_mixed(dim: usize) -> Result<QuantumStructure, QuantumError> {
    QuantumStructure::density(Matrix::from_real_diagonal(&vec![1.0 / dim as f64; dim]))
}

pub fn spin_axis(id: &str, theta: f64, phi: f64) -> Configuration {
    let (nx, ny, nz) = (libm::sin(theta) * libm::cos(phi), libm::sin(theta) * libm::sin(phi), libm::cos(theta));
    let proj = |s: f64| {
        Matrix::from_rows(&[
            vec![c((1.0 + s * nz) / 2.0, 0.0), c(s * nx / 2.0, -s * ny / 2.0)],
            vec![c(s * nx / 2.0, s * ny / 2.0), c((1.0 - s * nz) / 2.0, 0.0)],
        ])
        .expect("2x2")
    };
    projective(id, vec![("up", proj(1.0)), ("down", proj(-1.0))])
}

pub fn spin_z(id: &str) -> Configuration {
    projective(
        id,
        vec![("up", Matrix::from_real_diagonal(&[1.0, 0.0])), ("down", Matrix::from_real_diagonal(&[0.0, 1.0]))],
    )
}

pub fn spin_x(id: &str) -> Configuration {
    projective(
        id,
        vec![("up", Matrix::outer(&[c(H, 0.0), c(H, 0.0)])), ("down", Matrix::outer(&[c(H, 0.0), c(-H, 0.0)]))],
    )
}

pub fn spin_y(id: &str) -> Configuration {
    projective(
        id,
        vec![("up", Matrix::outer(&[c(H, 0.0), c(0.0, H)])), ("down", Matrix::outer(&[c(H, 0.0), c(0.0, -H)]))],
    )
}

/// Open-geometry detection: `bright` = |+⟩⟨+|, `dark` = |−⟩⟨−|.
pub fn interference(id: &str) -> Configuration {
    projective(
        id,
        vec![("bright", Matrix::outer(&[c(H, 0.0), c(H, 0.0)])), ("dark", Matrix::outer(&[c(H, 0.0), c(-H, 0.0)]))],
    )
}

/// Detector at the slits: `left` = |0⟩⟨0|, `right` = |1⟩⟨1|.
pub fn which_path(id: &str) -> Configuration {
    projective(
        id,
        vec![("left", Matrix::from_real_diagonal(&[1.0, 0.0])), ("right", Matrix::from_real_diagonal(&[0.0, 1.0]))],
    )
}

pub fn bell_basis(id: &str) -> Configuration {
    let z = ZERO;
    let p = c(H, 0.0);
    let m = c(-H, 0.0);
    projective(
        id,
        vec![
            ("phi_plus", Matrix::outer(&[p, z, z, p])),
            ("phi_minus", Matrix::outer(&[p, z, z, m])),
            ("psi_plus", Matrix::outer(&[z, p, p, z])),
            ("psi_minus", Matrix::outer(&[z, p, m, z])),
        ],
    )
}

/// Joint spin configuration at polar angles α (first factor) and β
/// (second), both in the x-z plane.
pub fn joint_spin(id: &str, alpha: f64, beta: f64) -> Configuration {
    compose::tensor_config(&spin_axis("a", alpha, 0.0), &spin_axis("b", beta, 0.0))
        .expect("2x2 joint configuration")
        .with_id(id)
}

/// Computational basis with labels `b0 .. b{dim-1}`.
pub fn computational(id: &str, dim: usize) -> Result<Configuration, QuantumError> {
    let effects = (0..dim)
        .map(|k| {
            let mut d = vec![0.0; dim];
            d[k] = 1.0;
            Effect { label: OutcomeLabel::Atom(format!("b{k}")), operator: Matrix::from_real_diagonal(&d) }
        })
        .collect();
    Configuration::new(id, ConfigKind::Projective, effects)
}

/// Three-outcome symmetric qubit POVM with effects (2/3)|t_k⟩⟨t_k|.
pub fn trine(id: &str) -> Configuration {
    let effects = (0..3)
        .map(|k| {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / 3.0;
            let v = [c(libm::cos(theta / 2.0), 0.0), c(libm::sin(theta / 2.0), 0.0)];
            Effect { label: OutcomeLabel::Atom(format!("t{k}")), operator: Matrix::outer(&v).scale(c(2.0 / 3.0, 0.0)) }
        })
        .collect();
    Configuration::new(id, ConfigKind::Povm, effects).expect("trine POVM is valid")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuiltinError {
    #[error("unknown builtin `{0}`")]
    Unknown(String),
    #[error("builtin `{name}` takes {expected} argument(s), found {found}")]
    Arity { name: String, expected: &'static str, found: usize },
    #[error("builtin `{name}` has dimension {builtin}, but the system has dimension {system}")]
    Dimension { name: String, builtin: usize, system: usize },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub const STRUCTURE_NAMES: &[&str] = &[
    "up_z",
    "down_z",
    "up_x",
    "spin_up",
    "singlet",
    "phi_plus",
    "path_superposition",
    "marked_path",
    "maximally_mixed",
];

pub const CONFIG_NAMES: &[&str] = &[
    "spin_axis",
    "spin_z",
    "spin_x",
    "spin_y",
    "interference",
    "which_path",
    "bell_basis",
    "joint_spin",
    "computational",
    "trine",
];

fn arity(name: &str, args: &[f64], min: usize, max: usize, expected: &'static str) -> Result<(), BuiltinError> {
    if args.len() < min || args.len() > max {
        Err(BuiltinError::Arity { name: name.into(), expected, found: args.len() })
    } else {
        Ok(())
    }
}

fn finite_args(args: &[f64]) -> Result<(), BuiltinError> {
    if args.iter().all(|a| a.is_finite()) {
        Ok(())
    } else {
        Err(QuantumError::InvalidStructure("non-finite builtin argument".into()).into())
    }
}

fn fixed_dim<T>(name: &str, value: T, builtin: usize, system: usize) -> Result<T, BuiltinError> {
    if builtin == system {
        Ok(value)
    } else {
        Err(BuiltinError::Dimension { name: name.into(), builtin, system })
    }
}

/// Resolves `builtin NAME(args)` for a structure over a system of `dim`.
pub fn structure(name: &str, args: &[f64], dim: usize) -> Result<QuantumStructure, BuiltinError> {
    finite_args(args)?;
    let s = match name {
        "up_z" | "down_z" | "up_x" | "singlet" | "phi_plus" | "maximally_mixed" => {
            arity(name, args, 0, 0, "0")?;
            match name {
                "up_z" => up_z(),
                "down_z" => down_z(),
                "up_x" => up_x(),
                "singlet" => singlet(),
                "phi_plus" => phi_plus(),
                _ => return Ok(maximally_mixed(dim)?),
            }
        }
        "spin_up" => {
            arity(name, args, 1, 2, "1 or 2")?;
            spin_up(args[0], args.get(1).copied().unwrap_or(0.0))
        }
        "path_superposition" => {
            arity(name, args, 1, 1, "1")?;
            path_superposition(args[0])
        }
        "marked_path" => {
            arity(name, args, 1, 1, "1")?;
            marked_path(args[0])
        }
        _ => return Err(BuiltinError::Unknown(name.into())),
    };
    let d = s.dim();
    fixed_dim(name, s, d, dim)
}

/// Resolves `builtin NAME(args)` for a configuration `id` over a system of
/// `dim`.
pub fn configuration(id: &str, name: &str, args: &[f64], dim: usize) -> Result<Configuration, BuiltinError> {
    finite_args(args)?;
    let cfg = match name {
        "spin_axis" => {
            arity(name, args, 1, 2, "1 or 2")?;
            spin_axis(id, args[0], args.get(1).copied().unwrap_or(0.0))
        }
        "joint_spin" => {
            arity(name, args, 2, 2, "2")?;
            joint_spin(id, args[0], args[1])
        }
        "computational" => {
            arity(name, args, 0, 0, "0")?;
            return Ok(computational(id, dim)?);
        }
        "spin_z" | "spin_x" | "spin_y" | "interference" | "which_path" | "bell_basis" | "trine" => {
            arity(name, args, 0, 0, "0")?;
            match name {
                "spin_z" => spin_z(id),
                "spin_x" => spin_x(id),
                "spin_y" => spin_y(id),
                "interference" => interference(id),
                "which_path" => which_path(id),
                "bell_basis" => bell_basis(id),
                _ => trine(id),
            }
        }
        _ => return Err(BuiltinError::Unknown(name.into())),
    };
    let d = cfg.dim();
    fixed_dim(name, cfg, d, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_builtin_resolves() {
        for name in STRUCTURE_NAMES {
            let args: &[f64] = match *name {
                "spin_up" | "path_superposition" | "marked_path" => &[0.4],
                _ => &[],
            };
            let dim = match *name {
                "singlet" | "phi_plus" | "marked_path" => 4,
                _ => 2,
            };
            structure(name, args, dim).unwrap();
        }
        for name in CONFIG_NAMES {
            let args: &[f64] = match *name {
                "spin_axis" => &[0.4],
                "joint_spin" => &[0.4, 1.0],
                _ => &[],
            };
            let dim = match *name {
                "bell_basis" | "joint_spin" => 4,
                _ => 2,
            };
            configuration("c", name, args, dim).unwrap();
        }
    }

    #[test]
    fn builtin_errors() {
        assert_eq!(structure("nope", &[], 2), Err(BuiltinError::Unknown("nope".into())));
        assert!(matches!(structure("singlet", &[], 2), Err(BuiltinError::Dimension { .. })));
        assert!(matches!(configuration("c", "spin_axis", &[], 2), Err(BuiltinError::Arity { .. })));
        assert!(matches!(configuration("c", "spin_axis", &[f64::INFINITY], 2), Err(BuiltinError::Quantum(_))));
    }

    #[test]
    fn spin_axis_matches_named_axes() {
        use core::f64::consts::FRAC_PI_2;
        let pairs = [
            (spin_axis("a", 0.0, 0.0), spin_z("z")),
            (spin_axis("a", FRAC_PI_2, 0.0), spin_x("x")),
            (spin_axis("a", FRAC_PI_2, FRAC_PI_2), spin_y("y")),
        ];
        for (a, b) in pairs {
            for (ea, eb) in a.effects().iter().zip(b.effects()) {
                assert!(ea.operator.max_abs_diff(&eb.operator) < 1e-12);
            }
        }
    }

    #[test]
    fn trine_is_povm() {
        assert_eq!(trine("t").kind(), ConfigKind::Povm);
        assert_eq!(trine("t").effects().len(), 3);
    }
}
