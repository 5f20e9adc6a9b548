use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{check_dim, OutcomeLabel, QuantumError, TOL_HERM, TOL_PSD};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigKind {
    Projective,
    Povm,
}

/// One outcome of a configuration together with its effect operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    pub label: OutcomeLabel,
    pub operator: Matrix,
}

/// A measurement configuration: labeled effects that sum to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    id: String,
    dim: usize,
    kind: ConfigKind,
    effects: Vec<Effect>,
}

impl Configuration {
    /// Validates and builds a configuration.
    ///
    /// Every effect must be Hermitian and positive semidefinite, the effects
    /// must sum to the identity, and labels must be unique. A projective
    /// configuration additionally needs idempotent, pairwise orthogonal
    /// effects.
    pub fn new(id: impl Into<String>, kind: ConfigKind, effects: Vec<Effect>) -> Result<Self, QuantumError> {
        let invalid = |msg: String| Err(QuantumError::InvalidConfiguration(msg));
        let Some(first) = effects.first() else {
            return invalid("a configuration needs at least one effect".into());
        };
        let dim = first.operator.dim();
        check_dim(dim)?;
        for (i, e) in effects.iter().enumerate() {
            if e.operator.dim() != dim {
                return Err(QuantumError::DimensionMismatch { expected: dim, found: e.operator.dim() });
            }
            if !e.operator.is_finite() {
                return invalid(format!("effect `{}` has a non-finite entry", e.label));
            }
            if effects[..i].iter().any(|o| o.label == e.label) {
                return invalid(format!("duplicate outcome label `{}`", e.label));
            }
            let defect = e.operator.hermiticity_defect();
            if defect > TOL_HERM {
                return invalid(format!("effect `{}` is not Hermitian", e.label));
            }
        }

        let mut sum = Matrix::zeros(dim);
        for e in &effects {
            sum = sum.add(&e.operator);
        }
        if sum.max_abs_diff(&Matrix::identity(dim)) > TOL_HERM {
            return invalid("effects do not sum to the identity".into());
        }

        match kind {
            ConfigKind::Projective => {
                for (i, e) in effects.iter().enumerate() {
                    let sq = e.operator.mul(&e.operator);
                    if sq.max_abs_diff(&e.operator) > TOL_HERM {
                        return invalid(format!("effect `{}` is not a projector", e.label));
                    }
                    for other in &effects[i + 1..] {
                        if e.operator.mul(&other.operator).max_abs() > TOL_HERM {
                            return invalid(format!(
                                "projectors `{}` and `{}` are not orthogonal",
                                e.label, other.label
                            ));
                        }
                    }
                }
            }
            ConfigKind::Povm => {
                for e in &effects {
                    if e.operator.min_hermitian_eigenvalue() < TOL_PSD {
                        return invalid(format!("effect `{}` is not positive", e.label));
                    }
                }
            }
        }

        Ok(Configuration { id: id.into(), dim, kind, effects })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ConfigKind {
        self.kind
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn labels(&self) -> impl Iterator<Item = &OutcomeLabel> {
        self.effects.iter().map(|e| &e.label)
    }

    pub fn effect(&self, label: &OutcomeLabel) -> Option<&Effect> {
        self.effects.iter().find(|e| &e.label == label)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Lifts this configuration onto factor `position` of a composite whose
    /// factor dimensions are `factor_dims`, padding with identities.
    pub fn embed(&self, factor_dims: &[usize], position: usize) -> Result<Self, QuantumError> {
        let Some(&here) = factor_dims.get(position) else {
            return Err(QuantumError::InvalidConfiguration(format!("factor index {position} out of range")));
        };
        if here != self.dim {
            return Err(QuantumError::DimensionMismatch { expected: here, found: self.dim });
        }
        let before: usize = factor_dims[..position].iter().product();
        let after: usize = factor_dims[position + 1..].iter().product();
        check_dim(before * self.dim * after)?;
        let left = Matrix::identity(before);
        let right = Matrix::identity(after);
        let effects = self
            .effects
            .iter()
            .map(|e| Effect { label: e.label.clone(), operator: left.kron(&e.operator).kron(&right) })
            .collect();
        Ok(Configuration { id: self.id.clone(), dim: before * self.dim * after, kind: self.kind, effects })
    }
}

/// Two configurations are compatible when every effect of one commutes with
/// every effect of the other.
pub fn compatible(a: &Configuration, b: &Configuration) -> Result<bool, QuantumError> {
    if a.dim != b.dim {
        return Err(QuantumError::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    Ok(a.effects.iter().all(|ea| b.effects.iter().all(|eb| ea.operator.commutator_norm(&eb.operator) <= TOL_HERM)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::builtins;
    use alloc::vec;

    fn diag(label: &str, d: &[f64]) -> Effect {
        Effect { label: label.into(), operator: Matrix::from_real_diagonal(d) }
    }

    #[test]
    fn rejects_effects_not_summing_to_identity() {
        let r = Configuration::new("c", ConfigKind::Projective, vec![diag("a", &[1.0, 0.0])]);
        assert!(matches!(r, Err(QuantumError::InvalidConfiguration(_))));
    }

    #[test]
    fn rejects_duplicate_labels() {
        let r = Configuration::new("c", ConfigKind::Projective, vec![diag("a", &[1.0, 0.0]), diag("a", &[0.0, 1.0])]);
        assert!(matches!(r, Err(QuantumError::InvalidConfiguration(m)) if m.contains("duplicate")));
    }

    #[test]
    fn povm_effects_need_not_be_projectors() {
        let effects = vec![diag("a", &[0.5, 0.5]), diag("b", &[0.5, 0.5])];
        assert!(Configuration::new("c", ConfigKind::Projective, effects.clone()).is_err());
        assert!(Configuration::new("c", ConfigKind::Povm, effects).is_ok());
    }

    #[test]
    fn rejects_negative_povm_effect() {
        let effects = vec![diag("a", &[1.5, 0.0]), diag("b", &[-0.5, 1.0])];
        assert!(Configuration::new("c", ConfigKind::Povm, effects).is_err());
    }

    #[test]
    fn z_and_x_are_incompatible() {
        let z = builtins::spin_z("z");
        let x = builtins::spin_x("x");
        assert!(compatible(&z, &z).unwrap());
        assert!(!compatible(&z, &x).unwrap());
        assert!(!compatible(&x, &z).unwrap());
    }

    #[test]
    fn configs_on_different_factors_commute() {
        let z = builtins::spin_z("z");
        let x = builtins::spin_x("x");
        let zl = z.embed(&[2, 2], 0).unwrap();
        let xr = x.embed(&[2, 2], 1).unwrap();
        assert_eq!(zl.dim(), 4);
        assert!(compatible(&zl, &xr).unwrap());
        let zr = z.embed(&[2, 2], 1).unwrap();
        assert!(compatible(&zl, &zr).unwrap());
        assert!(!compatible(&xr, &zr).unwrap());
    }

    #[test]
    fn compatible_rejects_dimension_mismatch() {
        let z = builtins::spin_z("z");
        let zz = z.embed(&[2, 2], 0).unwrap();
        assert!(matches!(compatible(&z, &zz), Err(QuantumError::DimensionMismatch { .. })));
    }
}
