//! Holevo accounting and distinguishability of channel outputs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::randomizer::{compose_apply, ChannelSpec};
use crate::state::{von_neumann_entropy, DensityMatrix, LogBase, PureState, STATE_TOL};

/// A finite ensemble `{p_i, ρ_i}`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    states: Vec<DensityMatrix>,
    probs: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: Vec<DensityMatrix>, probs: Vec<f64>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        if states.len() != probs.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} states but {} probabilities",
                states.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(Error::InvalidEnsemble(format!("negative probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        let n = states[0].n();
        if let Some(s) = states.iter().find(|s| s.n() != n) {
            return Err(Error::InvalidEnsemble(format!("mixed qubit counts {n} and {}", s.n())));
        }
        Ok(Ensemble { states, probs })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        let probs = vec![p; states.len()];
        Ensemble::new(states, probs)
    }

    /// The `2ⁿ` computational basis states with equal weight.
    pub fn computational_basis(n: usize) -> Result<Self> {
        let states = (0..1usize << n)
            .map(|i| DensityMatrix::from_pure(&PureState::basis(n, i)?))
            .collect::<Result<_>>()?;
        Ensemble::uniform(states)
    }

    pub fn n(&self) -> usize {
        self.states[0].n()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `Σ pᵢ ρᵢ`.
    pub fn mixture(&self) -> Result<DensityMatrix> {
        self.average(&self.states)
    }

    fn average(&self, states: &[DensityMatrix]) -> Result<DensityMatrix> {
        let dim = states[0].dim();
        let mut acc = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (s, p) in states.iter().zip(&self.probs) {
            acc += s.matrix() * Complex64::new(*p, 0.0);
        }
        DensityMatrix::from_matrix_unchecked(acc)
    }
}

/// `S(Σ p_i ρ_i) − Σ p_i S(ρ_i)` of the raw ensemble.
pub fn holevo_quantity(ens: &Ensemble, base: LogBase) -> Result<f64> {
    holevo_of(ens, ens.states(), base)
}

fn holevo_of(ens: &Ensemble, states: &[DensityMatrix], base: LogBase) -> Result<f64> {
    let avg = ens.average(states)?;
    let mean_entropy: f64 =
        states.iter().zip(ens.probs()).map(|(s, p)| p * von_neumann_entropy(s, base)).sum();
    Ok(von_neumann_entropy(&avg, base) - mean_entropy)
}

/// `χ{p_i, R(ρ_i)}` for the channel `spec`.
pub fn holevo_information(ens: &Ensemble, spec: &ChannelSpec, base: LogBase) -> Result<f64> {
    if ens.n() != spec.n() {
        return Err(Error::DimensionMismatch { expected: 1 << spec.n(), got: 1 << ens.n() });
    }
    let outputs = ens.states().iter().map(|s| compose_apply(spec, s)).collect::<Result<Vec<_>>>()?;
    holevo_of(ens, &outputs, base)
}

/// `log(1 + dε)` together with the regime flags that go with it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolevoBound {
    pub value: f64,
    pub base: LogBase,
    /// `dε < 1`.
    pub small_regime: bool,
    /// `ln(1 + dε) < dε`; reported only in natural log, where it is an
    /// identity for `dε > 0`.
    pub below_linear: Option<bool>,
}

pub fn holevo_bound(d: usize, epsilon: f64, base: LogBase) -> HolevoBound {
    let x = d as f64 * epsilon;
    let value = base.log(1.0 + x);
    HolevoBound {
        value,
        base,
        small_regime: x < 1.0,
        below_linear: match base {
            LogBase::E => Some(value < x),
            LogBase::Two => None,
        },
    }
}

/// `½‖R(ρ₁) − R(ρ₂)‖₁`.
pub fn distinguishing_advantage(spec: &ChannelSpec, rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.n() != rho2.n() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), got: rho2.dim() });
    }
    let a = compose_apply(spec, rho1)?;
    let b = compose_apply(spec, rho2)?;
    Ok(0.5 * a.trace_distance(&b)?)
}

/// Holevo comparison in machine-readable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub chi: f64,
    pub bound: f64,
    pub base: LogBase,
    pub d: usize,
    pub epsilon: f64,
    pub pass: bool,
}

impl SecurityReport {
    pub fn evaluate(ens: &Ensemble, spec: &ChannelSpec, epsilon: f64, base: LogBase) -> Result<Self> {
        let chi = holevo_information(ens, spec, base)?;
        let d = 1usize << spec.n();
        let bound = holevo_bound(d, epsilon, base).value;
        Ok(SecurityReport { chi, bound, base, d, epsilon, pass: chi <= bound + 1e-12 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliKey;
    use crate::randomizer::{sample_and_certify, KeySet};
    use crate::state::{density_from_pure, random_pure_state};

    fn identity_channel(n: usize) -> ChannelSpec {
        ChannelSpec::single(KeySet::singleton(PauliKey::identity(n).unwrap()))
    }

    fn full_channel(n: usize) -> ChannelSpec {
        ChannelSpec::single(KeySet::full(n).unwrap())
    }

    fn random_ensemble(n: usize, size: usize, seed: u64) -> Ensemble {
        let states = (0..size)
            .map(|i| density_from_pure(&random_pure_state(n, seed * 100 + i as u64).unwrap()).unwrap())
            .collect();
        let raw: Vec<f64> = (1..=size).map(|i| i as f64).collect();
        let total: f64 = raw.iter().sum();
        Ensemble::new(states, raw.iter().map(|r| r / total).collect()).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        let rho = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(Ensemble::new(vec![], vec![]).is_err());
        assert!(Ensemble::new(vec![rho.clone()], vec![0.5]).is_err());
        assert!(Ensemble::new(vec![rho.clone(), rho.clone()], vec![1.5, -0.5]).is_err());
        assert!(Ensemble::new(vec![rho.clone()], vec![0.5, 0.5]).is_err());
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(Ensemble::new(vec![rho, two], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn complete_randomizer_leaks_nothing() {
        for n in 1..=3 {
            let ens = random_ensemble(n, 4, n as u64);
            assert!(holevo_information(&ens, &full_channel(n), LogBase::Two).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn identity_channel_on_orthogonal_pair_is_one_bit() {
        let ens = Ensemble::computational_basis(1).unwrap();
        let chi = holevo_information(&ens, &identity_channel(1), LogBase::Two).unwrap();
        assert!((chi - 1.0).abs() < 1e-9);
        let nats = holevo_information(&ens, &identity_channel(1), LogBase::E).unwrap();
        assert!((nats - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn chi_stays_within_range() {
        for seed in 0..5 {
            let ens = random_ensemble(2, 5, seed);
            let chi = holevo_information(&ens, &identity_channel(2), LogBase::Two).unwrap();
            assert!((-1e-9..=2.0 + 1e-9).contains(&chi));
            assert!((chi - holevo_quantity(&ens, LogBase::Two).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn chi_is_invariant_under_relabeling() {
        let ens = random_ensemble(2, 4, 9);
        let mut states = ens.states().to_vec();
        let mut probs = ens.probs().to_vec();
        states.reverse();
        probs.reverse();
        let permuted = Ensemble::new(states, probs).unwrap();
        let a = holevo_quantity(&ens, LogBase::Two).unwrap();
        let b = holevo_quantity(&permuted, LogBase::Two).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn randomizer_never_increases_chi() {
        let cert = sample_and_certify(3, 0.9, 4, 20).unwrap();
        let spec = ChannelSpec::single(cert.set);
        for seed in 0..5 {
            let ens = random_ensemble(3, 6, seed);
            let raw = holevo_information(&ens, &identity_channel(3), LogBase::Two).unwrap();
            let processed = holevo_information(&ens, &spec, LogBase::Two).unwrap();
            assert!(processed <= raw + 1e-9);
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(holevo_bound(4, 0.0, LogBase::Two).value, 0.0);
        for x in [0.1, 0.5, 0.9] {
            let b = holevo_bound(1, x, LogBase::E);
            assert!(b.value < x);
            assert_eq!(b.below_linear, Some(true));
            assert!(b.small_regime);
        }
        let b = holevo_bound(4, 0.2, LogBase::Two);
        assert!((b.value - 1.8f64.log2()).abs() < 1e-15);
        assert!((b.value - 0.848).abs() < 1e-3);
        assert!(b.small_regime);
        assert!(!holevo_bound(16, 0.8, LogBase::Two).small_regime);
        assert_eq!(b.below_linear, None);
    }

    #[test]
    fn certified_channel_respects_holevo_bound() {
        let cert = sample_and_certify(4, 0.8, 3, 50).unwrap();
        let spec = ChannelSpec::single(cert.set);
        let ens = Ensemble::computational_basis(4).unwrap();
        for base in [LogBase::Two, LogBase::E] {
            let report = SecurityReport::evaluate(&ens, &spec, 0.8, base).unwrap();
            assert!(report.pass, "{report:?}");
            assert_eq!(report.d, 16);
        }
        let json = serde_json::to_value(SecurityReport::evaluate(&ens, &spec, 0.8, LogBase::Two).unwrap()).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 6);
        for k in ["chi", "bound", "base", "d", "epsilon", "pass"] {
            assert!(keys.contains(&k));
        }
        assert_eq!(json["base"], "2");
    }

    #[test]
    fn advantage_examples() {
        let zero = density_from_pure(&PureState::basis(1, 0).unwrap()).unwrap();
        let one = density_from_pure(&PureState::basis(1, 1).unwrap()).unwrap();
        assert!((distinguishing_advantage(&identity_channel(1), &zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!(distinguishing_advantage(&full_channel(1), &zero, &one).unwrap() < 1e-12);

        let cert = sample_and_certify(4, 0.8, 6, 50).unwrap();
        let spec = ChannelSpec::single(cert.set);
        for i in 0..100 {
            let r1 = density_from_pure(&random_pure_state(4, 2 * i).unwrap()).unwrap();
            let r2 = density_from_pure(&random_pure_state(4, 2 * i + 1).unwrap()).unwrap();
            let adv = distinguishing_advantage(&spec, &r1, &r2).unwrap();
            let back = distinguishing_advantage(&spec, &r2, &r1).unwrap();
            assert!((adv - back).abs() < 1e-12);
            let via_mixed = 0.5
                * (compose_apply(&spec, &r1).unwrap().distance_to_maximally_mixed()
                    + compose_apply(&spec, &r2).unwrap().distance_to_maximally_mixed());
            assert!(adv <= via_mixed + 1e-12);
            assert!(adv <= 0.8);
        }
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(distinguishing_advantage(&identity_channel(1), &zero, &two).is_err());
    }
}
