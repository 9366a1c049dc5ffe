//! Key-set sizing, sample-and-certify, and ε verification.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bias::{bias_profile, BiasProfile};
use super::channel::{apply_multipliers, ChannelSpec};
use super::keyset::{KeySet, KeySetMeta, BIAS_CAP_BITS};
use crate::error::{Error, Result};
use crate::pauli::PauliKey;
use crate::rng::{self, domain, Rng};
use crate::state::{check_dense_qubits, random_pure_state_with, DensityMatrix};

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    Ok(())
}

/// `⌈n + 2·log₂(1/ε) + 4⌉`, the number of key bits; key sets have `2^{n_DN}` elements.
pub fn dn_key_length(n: usize, epsilon: f64) -> Result<u32> {
    check_epsilon(epsilon)?;
    let exact = n as f64 + 2.0 * (1.0 / epsilon).log2() + 4.0;
    // log2 of exact powers of two can land a few ulps above the integer.
    let nearest = exact.round();
    let bits = if (exact - nearest).abs() < 1e-9 { nearest } else { exact.ceil() };
    Ok(bits as u32)
}

/// `ε·2^{−n/2}`.
pub fn bias_threshold(n: usize, epsilon: f64) -> f64 {
    epsilon * 2f64.powf(-(n as f64) / 2.0)
}

/// `ε^{1/m}·2^{−n/(2m)}` for an `m`-party chain.
pub fn per_hop_threshold(n: usize, epsilon: f64, parties: usize) -> f64 {
    let m = parties as f64;
    epsilon.powf(1.0 / m) * 2f64.powf(-(n as f64) / (2.0 * m))
}

/// `size` keys drawn uniformly from `{0,1}^{2n}` with replacement.
pub fn sample_key_set(n: usize, size: usize, rng: &mut Rng) -> Result<KeySet> {
    if 2 * n > BIAS_CAP_BITS {
        return Err(Error::OverCap { n, cap: BIAS_CAP_BITS / 2 });
    }
    let points = 1u64 << (2 * n);
    let keys = (0..size).map(|_| PauliKey::from_index(n, rng.random_range(0..points))).collect::<Result<_>>()?;
    KeySet::new(n, keys)
}

/// Parameters of one certification run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyParams {
    pub n: usize,
    /// `log₂ |E|`.
    pub size_bits: u32,
    pub threshold: f64,
    /// Target ε recorded in the certified set's metadata.
    pub epsilon: f64,
    pub seed: u64,
    /// Distinguishes independent certifications under one seed (e.g. hops).
    pub stream: u64,
    pub max_retries: usize,
}

impl CertifyParams {
    /// Single-channel request: `2^{n_DN}` keys, threshold `ε·2^{−n/2}`.
    pub fn single(n: usize, epsilon: f64, seed: u64, max_retries: usize) -> Result<Self> {
        Ok(CertifyParams {
            n,
            size_bits: dn_key_length(n, epsilon)?,
            threshold: bias_threshold(n, epsilon),
            epsilon,
            seed,
            stream: 0,
            max_retries,
        })
    }

    /// Hop `hop` (1-based) of an `m`-party chain: threshold
    /// `ε^{1/m}·2^{−n/(2m)}`, sized by `n_DN` at the per-hop `ε^{1/m}`.
    pub fn hop(n: usize, epsilon: f64, parties: usize, hop: usize, seed: u64, max_retries: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        if parties < 2 {
            return Err(Error::Config(format!("need at least 2 parties, got {parties}")));
        }
        let hop_eps = epsilon.powf(1.0 / parties as f64);
        Ok(CertifyParams {
            n,
            size_bits: dn_key_length(n, hop_eps)?,
            threshold: per_hop_threshold(n, epsilon, parties),
            epsilon: hop_eps,
            seed,
            stream: hop as u64,
            max_retries,
        })
    }
}

/// A key set whose bias profile met the requested threshold.
#[derive(Clone, Debug)]
pub struct Certified {
    pub set: KeySet,
    pub profile: BiasProfile,
    pub attempts: usize,
    pub threshold: f64,
}

/// Best candidate seen by a certification run, certified or not.
#[derive(Clone, Debug)]
pub struct CertifyOutcome {
    pub best: Certified,
    pub certified: bool,
}

/// Samples up to `1 + max_retries` candidate sets and keeps the least biased.
pub fn certify(params: &CertifyParams) -> Result<CertifyOutcome> {
    if params.size_bits as usize > 40 {
        return Err(Error::Config(format!("key set of 2^{} elements is too large", params.size_bits)));
    }
    let size = 1usize << params.size_bits;
    let mut best: Option<Certified> = None;
    for attempt in 0..=params.max_retries {
        let mut rng = rng::stream(params.seed, domain::KEYSET, (params.stream << 32) | attempt as u64);
        let set = sample_key_set(params.n, size, &mut rng)?;
        let profile = bias_profile(&set)?;
        let better = best.as_ref().is_none_or(|b| profile.beta_max() < b.profile.beta_max());
        if better {
            best = Some(Certified { set, profile, attempts: attempt + 1, threshold: params.threshold });
        }
        let done = best.as_ref().is_some_and(|b| b.profile.beta_max() <= params.threshold);
        if done {
            break;
        }
    }
    let mut best = best.expect("at least one attempt");
    let certified = best.profile.beta_max() <= params.threshold;
    best.set.meta = KeySetMeta {
        epsilon: Some(params.epsilon),
        certified,
        beta_max: Some(best.profile.beta_max()),
    };
    Ok(CertifyOutcome { best, certified })
}

/// Draws `2^{n_DN}` keys and accepts iff `beta_max ≤ ε·2^{−n/2}`,
/// resampling up to `max_retries` times.
pub fn sample_and_certify(n: usize, epsilon: f64, seed: u64, max_retries: usize) -> Result<Certified> {
    certified_or_error(certify(&CertifyParams::single(n, epsilon, seed, max_retries)?)?, max_retries)
}

/// Per-hop variant of [`sample_and_certify`] for an `m`-party chain.
pub fn sample_and_certify_hop(
    n: usize,
    epsilon: f64,
    parties: usize,
    hop: usize,
    seed: u64,
    max_retries: usize,
) -> Result<Certified> {
    certified_or_error(certify(&CertifyParams::hop(n, epsilon, parties, hop, seed, max_retries)?)?, max_retries)
}

fn certified_or_error(outcome: CertifyOutcome, max_retries: usize) -> Result<Certified> {
    if outcome.certified {
        Ok(outcome.best)
    } else {
        Err(Error::CertificationFailed {
            attempts: max_retries + 1,
            best_beta_max: outcome.best.profile.beta_max(),
            threshold: outcome.best.threshold,
        })
    }
}

/// Analytic bound implied by a channel's largest nonzero bias.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub beta_max: f64,
    /// `ε·2^{−n/2}`.
    pub threshold: f64,
    pub certified: bool,
    /// Worst case of `‖R(ρ)‖₂²` over pure inputs: `(1 + β²(2ⁿ−1))/2ⁿ`.
    pub frobenius_bound: f64,
    /// `(1 + ε²)/2ⁿ`.
    pub frobenius_target: f64,
    /// Trace-distance bound through the chain: `β·√(2ⁿ−1)`.
    pub trace_bound: f64,
}

impl Certificate {
    pub fn new(n: usize, beta_max: f64, epsilon: f64) -> Self {
        let d = (1u64 << n) as f64;
        let threshold = bias_threshold(n, epsilon);
        Certificate {
            beta_max,
            threshold,
            certified: beta_max <= threshold,
            frobenius_bound: (1.0 + beta_max * beta_max * (d - 1.0)) / d,
            frobenius_target: (1.0 + epsilon * epsilon) / d,
            trace_bound: beta_max * (d - 1.0).sqrt(),
        }
    }
}

/// Outcome of [`verify_epsilon`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub certificate: Certificate,
    /// Largest `‖R(ρ) − 𝟙/2ⁿ‖₁` over the sampled pure states.
    pub max_distance: f64,
    /// Largest `√(2ⁿ‖R(ρ)‖₂² − 1)` over the sampled states.
    pub max_chain_bound: f64,
    /// `‖R(ρ)−𝟙/d‖₁ ≤ √(2ⁿ‖R(ρ)‖₂²−1)` held for every sample.
    pub chain_holds: bool,
    /// `2ⁿ‖R(ρ)‖₂² − 1 ≤ ε²` held for every sample.
    pub frobenius_holds: bool,
    /// `max_distance ≤ ε`.
    pub pass: bool,
}

/// Distance and chain value for one channel output.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Sample {
    pub distance: f64,
    pub chain: f64,
    pub frob_excess: f64,
}

pub(crate) fn measure(out: &DensityMatrix) -> Sample {
    let d = out.dim() as f64;
    let frob_excess = d * out.purity() - 1.0;
    Sample { distance: out.distance_to_maximally_mixed(), chain: frob_excess.max(0.0).sqrt(), frob_excess }
}

/// Channel outputs for `trials` seeded random pure inputs, in trial order.
pub(crate) fn sample_outputs(
    n: usize,
    multipliers: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<Sample>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, domain::TRIALS, t as u64);
            let rho = DensityMatrix::from_pure(&random_pure_state_with(n, &mut rng)?)?;
            Ok(measure(&apply_multipliers(&rho, multipliers)?))
        })
        .collect()
}

/// Certificate plus Monte-Carlo check over `trials` random pure states.
pub fn verify_epsilon(spec: &ChannelSpec, epsilon: f64, trials: usize, seed: u64) -> Result<VerificationReport> {
    let n = spec.n();
    check_dense_qubits(n)?;
    let certificate = Certificate::new(n, spec.composed_beta_max()?, epsilon);
    let samples = sample_outputs(n, &spec.multipliers()?, trials, seed)?;

    // Slack for rounding in the eigen solver; the inequality itself is exact.
    let slack = 1e-12;
    let max_distance = samples.iter().fold(0.0, |m, s| f64::max(m, s.distance));
    let max_chain_bound = samples.iter().fold(0.0, |m, s| f64::max(m, s.chain));
    let chain_holds = samples.iter().all(|s| s.distance <= s.chain + slack);
    let frobenius_holds = samples.iter().all(|s| s.frob_excess <= epsilon * epsilon + slack);
    Ok(VerificationReport {
        n,
        epsilon,
        trials,
        certificate,
        max_distance,
        max_chain_bound,
        chain_holds,
        frobenius_holds,
        pass: max_distance <= epsilon,
    })
}
