//! Finite-dimensional quantum structures, measurement configurations and the
//! Born-rule probability map `P(O | S, C)`.
//!
//! A [`QuantumStructure`] never stores outcome values. Outcomes only exist
//! relative to a [`Configuration`], and [`born_probabilities`] is the single
//! place where a structure and a configuration meet.

mod born;
pub mod builtins;
mod compose;
mod config;
mod label;
mod structure;

use alloc::string::String;

pub use born::{
    born_probabilities, repeatability_check, sample, sample_with, update, OutcomeCounts, OutcomeDistribution,
    RepeatabilityReport,
};
pub use compose::{partial_trace, tensor, tensor_config};
pub use config::{compatible, ConfigKind, Configuration, Effect};
pub use label::OutcomeLabel;
pub use structure::{QuantumStructure, StructureBody};

/// Norm and trace tolerance.
pub const TOL_NORM: f64 = 1e-9;
/// Hermiticity, identity-sum, idempotence and commutation tolerance.
pub const TOL_HERM: f64 = 1e-9;
/// Floor on the smallest eigenvalue of a positive semidefinite operator.
pub const TOL_PSD: f64 = -1e-9;
/// Probabilities at or below this are treated as zero.
pub const TOL_ZERO: f64 = 1e-12;
/// Largest Hilbert-space dimension accepted anywhere.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is outside 1..={MAX_DIM}")]
    DimensionLimit(usize),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("outcome `{0}` is not produced by the configuration")]
    UnknownOutcome(OutcomeLabel),
    #[error("outcome `{0}` has zero probability")]
    ZeroProbabilityOutcome(OutcomeLabel),
    #[error("state update needs a projective configuration")]
    NonProjectiveUpdate,
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("factor dimensions {factors:?} do not multiply to {dim}")]
    BadFactorization { dim: usize, factors: alloc::vec::Vec<usize> },
}

pub(crate) fn check_dim(dim: usize) -> Result<(), QuantumError> {
    if dim == 0 || dim > MAX_DIM {
        Err(QuantumError::DimensionLimit(dim))
    } else {
        Ok(())
    }
}
