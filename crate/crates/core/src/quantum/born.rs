use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConfigKind, Configuration, OutcomeLabel, QuantumError, QuantumStructure, StructureBody, TOL_ZERO};
use crate::linalg::{norm, ComplexScalar};

/// Outcome probabilities in the configuration's declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    entries: Vec<(OutcomeLabel, f64)>,
}

impl OutcomeDistribution {
    pub fn from_entries(entries: Vec<(OutcomeLabel, f64)>) -> Self {
        OutcomeDistribution { entries }
    }

    pub fn get(&self, label: &OutcomeLabel) -> Option<f64> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, p)| *p)
    }

    pub fn entries(&self) -> &[(OutcomeLabel, f64)] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }
}

/// Outcome counts in the configuration's declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeCounts {
    entries: Vec<(OutcomeLabel, u64)>,
}

impl OutcomeCounts {
    pub fn get(&self, label: &OutcomeLabel) -> Option<u64> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, c)| *c)
    }

    pub fn entries(&self) -> &[(OutcomeLabel, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }
}

/// `P(O | S, C)`: probability tr(E_O ρ) for every outcome of `config`.
pub fn born_probabilities(
    structure: &QuantumStructure,
    config: &Configuration,
) -> Result<OutcomeDistribution, QuantumError> {
    if structure.dim() != config.dim() {
        return Err(QuantumError::DimensionMismatch { expected: config.dim(), found: structure.dim() });
    }
    let entries = config
        .effects()
        .iter()
        .map(|e| {
            let p = structure.expectation(&e.operator).re;
            (e.label.clone(), p.clamp(0.0, 1.0))
        })
        .collect();
    Ok(OutcomeDistribution { entries })
}

/// Lüders update: the structure conditioned on `outcome`, E ρ E / tr(E ρ E).
pub fn update(
    structure: &QuantumStructure,
    config: &Configuration,
    outcome: &OutcomeLabel,
) -> Result<QuantumStructure, QuantumError> {
    if config.kind() != ConfigKind::Projective {
        return Err(QuantumError::NonProjectiveUpdate);
    }
    let dist = born_probabilities(structure, config)?;
    let effect = config.effect(outcome).ok_or_else(|| QuantumError::UnknownOutcome(outcome.clone()))?;
    if dist.get(outcome).unwrap_or(0.0) <= TOL_ZERO {
        return Err(QuantumError::ZeroProbabilityOutcome(outcome.clone()));
    }
    match structure.body() {
        StructureBody::Pure(psi) => {
            let projected = effect.operator.mul_vec(psi);
            let n = norm(&projected);
            let scaled = projected.into_iter().map(|z| z / n).collect();
            QuantumStructure::pure(scaled)
        }
        StructureBody::Density(rho) => {
            let num = effect.operator.mul(rho).mul(&effect.operator);
            let tr = num.trace().re;
            QuantumStructure::density(num.scale(ComplexScalar::new(1.0 / tr, 0.0)))
        }
    }
}

/// Draws `n` outcomes with a ChaCha8 generator seeded from `seed`.
pub fn sample(
    structure: &QuantumStructure,
    config: &Configuration,
    seed: u64,
    n: u64,
) -> Result<OutcomeCounts, QuantumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(structure, config, &mut rng, n)
}

/// Inverse-CDF sampling over the labels in declaration order.
pub fn sample_with<R: Rng + ?Sized>(
    structure: &QuantumStructure,
    config: &Configuration,
    rng: &mut R,
    n: u64,
) -> Result<OutcomeCounts, QuantumError> {
    let dist = born_probabilities(structure, config)?;
    let mut cumulative = Vec::with_capacity(dist.entries.len());
    let mut acc = 0.0;
    for (_, p) in &dist.entries {
        acc += p;
        cumulative.push(acc);
    }
    // Rounding can leave the last cumulative value a hair below 1; the
    // remainder goes to the last outcome that has any probability.
    let fallback = dist.entries.iter().rposition(|(_, p)| *p > TOL_ZERO).unwrap_or(0);
    let mut counts: Vec<u64> = alloc::vec![0; dist.entries.len()];
    for _ in 0..n {
        let u: f64 = rng.random();
        let idx = cumulative.iter().position(|&c| u < c).unwrap_or(fallback);
        counts[idx] += 1;
    }
    Ok(OutcomeCounts { entries: dist.entries.into_iter().map(|(l, _)| l).zip(counts).collect() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityReport {
    pub n: u64,
    pub counts: OutcomeCounts,
    pub probabilities: OutcomeDistribution,
    /// max over outcomes of |count/n − P|
    pub max_abs_deviation: f64,
    pub pass: bool,
}

/// Repeats `config` `n` times and compares frequencies with the Born
/// probabilities. Passes when every deviation is below `tol`.
pub fn repeatability_check(
    structure: &QuantumStructure,
    config: &Configuration,
    seed: u64,
    n: u64,
    tol: f64,
) -> Result<RepeatabilityReport, QuantumError> {
    if n == 0 {
        return Err(QuantumError::EmptySample);
    }
    let probabilities = born_probabilities(structure, config)?;
    let counts = sample(structure, config, seed, n)?;
    let max_abs_deviation = probabilities
        .entries
        .iter()
        .zip(&counts.entries)
        .map(|((_, p), (_, c))| (*c as f64 / n as f64 - p).abs())
        .fold(0.0, f64::max);
    Ok(RepeatabilityReport { n, counts, probabilities, max_abs_deviation, pass: max_abs_deviation < tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::builtins;
    use core::f64::consts::PI;

    fn up() -> OutcomeLabel {
        OutcomeLabel::atom("up")
    }

    fn down() -> OutcomeLabel {
        OutcomeLabel::atom("down")
    }

    // 2x2 oracle: for |0⟩, P = ⟨0|(I + n·σ)/2|0⟩ = (1 + n_z)/2.
    fn oracle_up_probability(theta: f64) -> f64 {
        (1.0 + libm::cos(theta)) / 2.0
    }

    #[test]
    fn eigenstate_is_certain() {
        let d = born_probabilities(&builtins::up_z(), &builtins::spin_z("z")).unwrap();
        assert_eq!(d.get(&up()), Some(1.0));
        assert_eq!(d.get(&down()), Some(0.0));
    }

    #[test]
    fn x_measurement_on_z_state_is_even() {
        let d = born_probabilities(&builtins::up_z(), &builtins::spin_x("x")).unwrap();
        assert!((d.get(&up()).unwrap() - 0.5).abs() < 1e-12);
        assert!((d.get(&down()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tilted_axis_matches_matrix_oracle() {
        let theta = PI / 3.0;
        let d = born_probabilities(&builtins::up_z(), &builtins::spin_axis("t", theta, 0.0)).unwrap();
        assert!((oracle_up_probability(theta) - 0.75).abs() < 1e-12);
        assert!((d.get(&up()).unwrap() - 0.75).abs() < 1e-12);
        assert!((d.get(&down()).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn born_rejects_dimension_mismatch() {
        let r = born_probabilities(&builtins::singlet(), &builtins::spin_z("z"));
        assert!(matches!(r, Err(QuantumError::DimensionMismatch { expected: 2, found: 4 })));
    }

    #[test]
    fn update_on_eigenstate_is_fixed_point() {
        let z = builtins::spin_z("z");
        let s = update(&builtins::up_z(), &z, &up()).unwrap();
        assert_eq!(s, builtins::up_z());
    }

    #[test]
    fn update_into_x_basis() {
        let x = builtins::spin_x("x");
        let s = update(&builtins::up_z(), &x, &up()).unwrap();
        // 2x2 projection oracle: P_+ |0⟩ = (|0⟩ + |1⟩)/2, normalized to |+⟩.
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let StructureBody::Pure(v) = s.body() else { panic!("expected pure") };
        assert!((v[0].re - h).abs() < 1e-12 && (v[1].re - h).abs() < 1e-12);
        let again = born_probabilities(&s, &x).unwrap();
        assert!((again.get(&up()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn update_density_matches_pure() {
        let x = builtins::spin_x("x");
        let mixed = QuantumStructure::density(builtins::up_z().density_matrix()).unwrap();
        let a = update(&mixed, &x, &up()).unwrap();
        let b = update(&builtins::up_z(), &x, &up()).unwrap();
        assert!(a.density_matrix().max_abs_diff(&b.density_matrix()) < 1e-12);
    }

    #[test]
    fn update_errors() {
        let z = builtins::spin_z("z");
        assert_eq!(update(&builtins::up_z(), &z, &down()), Err(QuantumError::ZeroProbabilityOutcome(down())));
        assert_eq!(
            update(&builtins::up_z(), &z, &"sideways".into()),
            Err(QuantumError::UnknownOutcome("sideways".into()))
        );
        assert_eq!(
            update(&builtins::up_z(), &builtins::trine("t"), &"t0".into()),
            Err(QuantumError::NonProjectiveUpdate)
        );
    }

    #[test]
    fn sample_zero_draws() {
        let c = sample(&builtins::up_z(), &builtins::spin_x("x"), 3, 0).unwrap();
        assert_eq!(c.total(), 0);
        assert_eq!(c.entries().len(), 2);
    }

    #[test]
    fn sample_eigenstate_all_mass_on_certain_outcome() {
        let c = sample(&builtins::up_z(), &builtins::spin_z("z"), 11, 5000).unwrap();
        assert_eq!(c.get(&up()), Some(5000));
        assert_eq!(c.get(&down()), Some(0));
    }

    #[test]
    fn sample_within_binomial_bound() {
        let n = 100_000u64;
        let c = sample(&builtins::up_z(), &builtins::spin_x("x"), 42, n).unwrap();
        let bound = 3.0 * libm::sqrt(n as f64 * 0.25);
        for (_, k) in c.entries() {
            assert!((*k as f64 - 50_000.0).abs() <= bound, "count {k}");
        }
        assert_eq!(c, sample(&builtins::up_z(), &builtins::spin_x("x"), 42, n).unwrap());
    }

    #[test]
    fn repeatability_seeds() {
        let (s, x) = (builtins::up_z(), builtins::spin_x("x"));
        let a = repeatability_check(&s, &x, 1, 100_000, 0.01).unwrap();
        let b = repeatability_check(&s, &x, 2, 100_000, 0.01).unwrap();
        assert!(a.pass && b.pass);
        assert_ne!(a.counts, b.counts);

        let eig = repeatability_check(&s, &builtins::spin_z("z"), 9, 777, 1e-12).unwrap();
        assert_eq!(eig.max_abs_deviation, 0.0);
        assert!(eig.pass);
        assert_eq!(repeatability_check(&s, &x, 1, 0, 0.1), Err(QuantumError::EmptySample));
    }
}
