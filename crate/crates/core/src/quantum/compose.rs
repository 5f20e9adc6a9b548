use alloc::format;
use alloc::vec::Vec;

use super::{
    check_dim, ConfigKind, Configuration, Effect, OutcomeLabel, QuantumError, QuantumStructure, StructureBody,
};
use crate::linalg::{kron_vec, Matrix, ZERO};

/// Composite structure `a ⊗ b`. Stays pure when both inputs are pure.
pub fn tensor(a: &QuantumStructure, b: &QuantumStructure) -> Result<QuantumStructure, QuantumError> {
    check_dim(a.dim() * b.dim())?;
    match (a.body(), b.body()) {
        (StructureBody::Pure(u), StructureBody::Pure(v)) => QuantumStructure::pure(kron_vec(u, v)),
        _ => QuantumStructure::density(a.density_matrix().kron(&b.density_matrix())),
    }
}

/// Joint configuration: outcome labels are pairs `(la, lb)` in row-major
/// order and effects are Kronecker products.
pub fn tensor_config(a: &Configuration, b: &Configuration) -> Result<Configuration, QuantumError> {
    check_dim(a.dim() * b.dim())?;
    let kind = if a.kind() == ConfigKind::Projective && b.kind() == ConfigKind::Projective {
        ConfigKind::Projective
    } else {
        ConfigKind::Povm
    };
    let mut effects = Vec::with_capacity(a.effects().len() * b.effects().len());
    for ea in a.effects() {
        for eb in b.effects() {
            effects.push(Effect {
                label: OutcomeLabel::pair(ea.label.clone(), eb.label.clone()),
                operator: ea.operator.kron(&eb.operator),
            });
        }
    }
    Configuration::new(format!("{}*{}", a.id(), b.id()), kind, effects)
}

/// Reduced structure on factor `keep` of a composite with factor dimensions
/// `factor_dims`, tracing out every other factor.
pub fn partial_trace(
    structure: &QuantumStructure,
    factor_dims: &[usize],
    keep: usize,
) -> Result<QuantumStructure, QuantumError> {
    let total: usize = factor_dims.iter().product();
    if total != structure.dim() || factor_dims.is_empty() {
        return Err(QuantumError::BadFactorization { dim: structure.dim(), factors: factor_dims.to_vec() });
    }
    let Some(&d) = factor_dims.get(keep) else {
        return Err(QuantumError::BadFactorization { dim: structure.dim(), factors: factor_dims.to_vec() });
    };
    let before: usize = factor_dims[..keep].iter().product();
    let after: usize = factor_dims[keep + 1..].iter().product();
    let rho = structure.density_matrix();
    let mut out = Matrix::zeros(d);
    // index = (x * d + i) * after + y, with x the "before" and y the "after" block
    for i in 0..d {
        for j in 0..d {
            let mut acc = ZERO;
            for x in 0..before {
                for y in 0..after {
                    let r = (x * d + i) * after + y;
                    let c = (x * d + j) * after + y;
                    acc += rho[(r, c)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    QuantumStructure::density(out)
}
