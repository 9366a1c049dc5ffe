//! Character sums `𝔼_{x∈E} (-1)^{x*(a,b)}` of a key multiset.
//!
//! Points `(a,b)` are indexed like keys, `(a << n) | b`, and the pairing
//! with a key `x = (u,v)` is the plain 2n-bit inner product `u*a + v*b`.
//! Sums are kept as exact integers; division by `|E|` happens on read.

use rayon::prelude::*;

use super::keyset::KeySet;
use crate::error::{Error, Result};
use crate::pauli::{parity, BitString};
use crate::walsh::fwht_i64;

/// `|𝔼_{x∈E}(-1)^{x*(a,b)}|`.
pub fn bias(set: &KeySet, a: &BitString, b: &BitString) -> Result<f64> {
    Ok(signed_bias(set, a, b)?.abs())
}

/// The character sum without the absolute value.
pub fn signed_bias(set: &KeySet, a: &BitString, b: &BitString) -> Result<f64> {
    for part in [a, b] {
        if part.len() != set.n() {
            return Err(Error::DimensionMismatch { expected: set.n(), got: part.len() });
        }
    }
    let point = (a.bits() << set.n()) | b.bits();
    Ok(character_sum(set, point) as f64 / set.len() as f64)
}

fn character_sum(set: &KeySet, point: u64) -> i64 {
    set.keys()
        .iter()
        .map(|k| if parity(k.index() & point) == 0 { 1 } else { -1 })
        .sum()
}

/// Full table of signed character sums of a key set.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasProfile {
    n: usize,
    size: usize,
    sums: Vec<i64>,
    beta_max: f64,
}

impl BiasProfile {
    fn from_sums(n: usize, size: usize, sums: Vec<i64>) -> Self {
        let worst = sums.iter().skip(1).map(|s| s.unsigned_abs()).max().unwrap_or(0);
        BiasProfile { n, size, sums, beta_max: worst as f64 / size as f64 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `|E|` the profile was computed for.
    pub fn set_size(&self) -> usize {
        self.size
    }

    /// Number of points, `4ⁿ`.
    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// Exact integer character sum at a point index.
    pub fn sum_at(&self, index: usize) -> i64 {
        self.sums[index]
    }

    pub fn signed_at(&self, index: usize) -> f64 {
        self.sums[index] as f64 / self.size as f64
    }

    /// `Bias(E,(a,b))` at a point index.
    pub fn beta_at(&self, index: usize) -> f64 {
        self.signed_at(index).abs()
    }

    pub fn beta(&self, a: u64, b: u64) -> f64 {
        self.beta_at(((a << self.n) | b) as usize)
    }

    /// All `|β|` values in index order.
    pub fn betas(&self) -> Vec<f64> {
        (0..self.sums.len()).map(|i| self.beta_at(i)).collect()
    }

    pub fn signed(&self) -> Vec<f64> {
        (0..self.sums.len()).map(|i| self.signed_at(i)).collect()
    }

    /// Largest `|β|` over nonzero points (0 when `n` has no nonzero points).
    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    /// Whether every nonzero point has bias at most `beta`.
    pub fn is_biased_at_most(&self, beta: f64) -> bool {
        self.beta_max <= beta
    }

    /// Per-point multiplier of the conjugation channel `R_E`: the coefficient
    /// of `X^aZ^b` is scaled by `𝔼_{(u,v)∈E}(-1)^{a*v + b*u}`, which is the
    /// character sum at the swapped point `(b,a)`.
    pub fn channel_multipliers(&self) -> Vec<f64> {
        let n = self.n;
        let mask = (1usize << n) - 1;
        (0..self.sums.len())
            .map(|idx| {
                let (a, b) = (idx >> n, idx & mask);
                self.signed_at((b << n) | a)
            })
            .collect()
    }
}

/// Profile via one Walsh–Hadamard transform of the multiplicity vector.
pub fn bias_profile(set: &KeySet) -> Result<BiasProfile> {
    let mut sums = set.multiplicities()?;
    fwht_i64(&mut sums);
    Ok(BiasProfile::from_sums(set.n(), set.len(), sums))
}

/// Profile by direct enumeration of every point against every key.
pub fn bias_profile_direct(set: &KeySet) -> Result<BiasProfile> {
    set.check_bias_cap()?;
    let points = 1u64 << (2 * set.n());
    let sums = (0..points).into_par_iter().map(|p| character_sum(set, p)).collect();
    Ok(BiasProfile::from_sums(set.n(), set.len(), sums))
}
