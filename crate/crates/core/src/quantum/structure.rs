use alloc::format;
use alloc::vec::Vec;

use super::{check_dim, QuantumError, TOL_HERM, TOL_NORM, TOL_PSD};
use crate::linalg::{norm, ComplexScalar, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub enum StructureBody {
    Pure(Vec<ComplexScalar>),
    Density(Matrix),
}

/// A validated quantum state: either a unit vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStructure {
    dim: usize,
    body: StructureBody,
}

impl QuantumStructure {
    pub fn pure(amplitudes: Vec<ComplexScalar>) -> Result<Self, QuantumError> {
        let dim = amplitudes.len();
        check_dim(dim)?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QuantumError::InvalidStructure("non-finite amplitude".into()));
        }
        let n = norm(&amplitudes);
        if (n * n - 1.0).abs() > TOL_NORM {
            return Err(QuantumError::InvalidStructure(format!("state vector has squared norm {}, expected 1", n * n)));
        }
        Ok(QuantumStructure { dim, body: StructureBody::Pure(amplitudes) })
    }

    pub fn density(rho: Matrix) -> Result<Self, QuantumError> {
        let dim = rho.dim();
        check_dim(dim)?;
        if !rho.is_finite() {
            return Err(QuantumError::InvalidStructure("non-finite matrix entry".into()));
        }
        let defect = rho.hermiticity_defect();
        if defect > TOL_HERM {
            return Err(QuantumError::InvalidStructure(format!("density matrix is not Hermitian (defect {defect:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TOL_NORM || tr.im.abs() > TOL_NORM {
            return Err(QuantumError::InvalidStructure(format!(
                "density matrix has trace {}{:+}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min = rho.min_hermitian_eigenvalue();
        if min < TOL_PSD {
            return Err(QuantumError::InvalidStructure(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(QuantumStructure { dim, body: StructureBody::Density(rho) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn body(&self) -> &StructureBody {
        &self.body
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.body, StructureBody::Pure(_))
    }

    /// ρ = |ψ⟩⟨ψ| for a pure structure, the stored matrix otherwise.
    pub fn density_matrix(&self) -> Matrix {
        match &self.body {
            StructureBody::Pure(v) => Matrix::outer(v),
            StructureBody::Density(m) => m.clone(),
        }
    }

    /// Expectation value tr(A ρ).
    pub fn expectation(&self, op: &Matrix) -> ComplexScalar {
        match &self.body {
            StructureBody::Pure(v) => crate::linalg::inner(v, &op.mul_vec(v)),
            StructureBody::Density(m) => op.trace_product(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use alloc::vec;

    #[test]
    fn rejects_unnormalized_vector() {
        let err = QuantumStructure::pure(vec![ONE, ONE]).unwrap_err();
        assert!(matches!(err, QuantumError::InvalidStructure(_)));
    }

    #[test]
    fn rejects_non_psd_density() {
        let m = Matrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(QuantumStructure::density(m).is_err());
    }

    #[test]
    fn rejects_empty_and_oversized() {
        assert_eq!(QuantumStructure::pure(vec![]), Err(QuantumError::DimensionLimit(0)));
        let mut big = vec![ZERO; 65];
        big[0] = ONE;
        assert_eq!(QuantumStructure::pure(big), Err(QuantumError::DimensionLimit(65)));
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let m = Matrix::from_real_diagonal(&[0.5, 0.5]);
        let s = QuantumStructure::density(m).unwrap();
        assert!(!s.is_pure());
    }
}
