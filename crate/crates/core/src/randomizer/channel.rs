//! The conjugation channel `R_E(ρ) = |E|⁻¹ Σ_{(u,v)∈E} X^uZ^v ρ Z^vX^u` and
//! compositions of such channels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::bias::bias_profile;
use super::keyset::KeySet;
use crate::error::{Error, Result};
use crate::pauli::parity;
use crate::state::{decompose, DensityMatrix};

/// An ordered chain of hops `R_{E_m} ∘ ⋯ ∘ R_{E_1}`; `hops[0]` acts first.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    hops: Vec<KeySet>,
}

impl ChannelSpec {
    pub fn new(hops: Vec<KeySet>) -> Result<Self> {
        let first = hops.first().ok_or_else(|| Error::Config("channel needs at least one hop".into()))?;
        if let Some(bad) = hops.iter().find(|h| h.n() != first.n()) {
            return Err(Error::QubitMismatch(first.n(), bad.n()));
        }
        Ok(ChannelSpec { hops })
    }

    pub fn single(set: KeySet) -> Self {
        ChannelSpec { hops: vec![set] }
    }

    pub fn n(&self) -> usize {
        self.hops[0].n()
    }

    pub fn hops(&self) -> &[KeySet] {
        &self.hops
    }

    /// The first `count` hops.
    pub fn prefix(&self, count: usize) -> Result<ChannelSpec> {
        if count == 0 || count > self.hops.len() {
            return Err(Error::InvalidHop { hop: count, max: self.hops.len() });
        }
        Ok(ChannelSpec { hops: self.hops[..count].to_vec() })
    }

    /// Per-point multipliers of the composed map: the product over hops of
    /// each hop's signed symplectic character.
    pub fn multipliers(&self) -> Result<Vec<f64>> {
        let mut acc: Option<Vec<f64>> = None;
        for hop in &self.hops {
            let m = bias_profile(hop)?.channel_multipliers();
            acc = Some(match acc {
                None => m,
                Some(prev) => prev.iter().zip(&m).map(|(x, y)| x * y).collect(),
            });
        }
        Ok(acc.expect("at least one hop"))
    }

    /// Signed bias of the composed channel, in key-point indexing: the
    /// pointwise product of the per-hop signed biases.
    pub fn composed_signed_bias(&self) -> Result<Vec<f64>> {
        let mut acc = vec![1.0; 1 << (2 * self.n())];
        for hop in &self.hops {
            let profile = bias_profile(hop)?;
            for (i, v) in acc.iter_mut().enumerate() {
                *v *= profile.signed_at(i);
            }
        }
        Ok(acc)
    }

    /// Largest composed `|β|` over nonzero points.
    pub fn composed_beta_max(&self) -> Result<f64> {
        Ok(self.composed_signed_bias()?.iter().skip(1).fold(0.0, |m, b| m.max(b.abs())))
    }
}

fn check_n(set_n: usize, rho: &DensityMatrix) -> Result<()> {
    if set_n != rho.n() {
        return Err(Error::DimensionMismatch { expected: 1 << set_n, got: rho.dim() });
    }
    Ok(())
}

/// Direct average of the `|E|` conjugations.
pub fn channel_apply_average(set: &KeySet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_n(set.n(), rho)?;
    let dim = rho.dim();
    let src = rho.matrix();
    let mut acc = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let signs: Vec<Vec<f64>> = set
        .keys()
        .iter()
        .map(|k| (0..dim as u64).map(|i| if parity(i & k.b()) == 0 { 1.0 } else { -1.0 }).collect())
        .collect();
    for (key, sign) in set.keys().iter().zip(&signs) {
        let a = key.a() as usize;
        for j in 0..dim {
            for i in 0..dim {
                acc[(i ^ a, j ^ a)] += src[(i, j)] * (sign[i] * sign[j]);
            }
        }
    }
    acc /= Complex64::new(set.len() as f64, 0.0);
    DensityMatrix::from_matrix_unchecked(acc)
}

/// Scales each Pauli coefficient by its channel multiplier.
pub(crate) fn apply_multipliers(rho: &DensityMatrix, multipliers: &[f64]) -> Result<DensityMatrix> {
    let n = rho.n();
    let mut c = decompose::decompose_matrix(n, rho.matrix());
    if c.len() != multipliers.len() {
        return Err(Error::DimensionMismatch { expected: c.len(), got: multipliers.len() });
    }
    for (coeff, m) in c.iter_mut().zip(multipliers) {
        *coeff *= m;
    }
    DensityMatrix::from_matrix_unchecked(decompose::reconstruct_matrix(n, &c))
}

/// Same map as [`channel_apply_average`], computed coefficient-wise in the
/// Pauli basis from the set's signed bias profile.
pub fn channel_apply_spectral(set: &KeySet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_n(set.n(), rho)?;
    apply_multipliers(rho, &bias_profile(set)?.channel_multipliers())
}

/// `R_{E_m} ∘ ⋯ ∘ R_{E_1}(ρ)`.
pub fn compose_apply(spec: &ChannelSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_n(spec.n(), rho)?;
    apply_multipliers(rho, &spec.multipliers()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{key_matrix, PauliKey, PhasedPauli, compose};
    use crate::state::{density_from_pure, random_pure_state};
    use rand::Rng;

    fn random_set(n: usize, size: usize, seed: u64) -> KeySet {
        let mut rng = crate::rng::stream(seed, 60, 0);
        let keys = (0..size)
            .map(|_| PauliKey::from_index(n, rng.random_range(0..1u64 << (2 * n))).unwrap())
            .collect();
        KeySet::new(n, keys).unwrap()
    }

    fn random_rho(n: usize, seed: u64) -> DensityMatrix {
        density_from_pure(&random_pure_state(n, seed).unwrap()).unwrap()
    }

    #[test]
    fn full_set_completely_randomizes() {
        for n in 1..=3 {
            let full = KeySet::full(n).unwrap();
            let mixed = DensityMatrix::maximally_mixed(n).unwrap();
            for seed in 0..5 {
                let rho = random_rho(n, seed);
                assert!(channel_apply_average(&full, &rho).unwrap().max_abs_diff(&mixed).unwrap() < 1e-15);
                let spectral = channel_apply_spectral(&full, &rho).unwrap();
                assert!(spectral.max_abs_diff(&mixed).unwrap() < 1e-15);
                let c = decompose::decompose_matrix(n, spectral.matrix());
                assert!(c.iter().skip(1).all(|z| z.norm() < 1e-14));
            }
        }
    }

    #[test]
    fn identity_set_and_mixed_fixed_point() {
        let id = KeySet::singleton(PauliKey::identity(2).unwrap());
        let rho = random_rho(2, 3);
        assert_eq!(channel_apply_average(&id, &rho).unwrap(), rho);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let set = random_set(2, 5, 1);
        assert!(channel_apply_average(&set, &mixed).unwrap().max_abs_diff(&mixed).unwrap() < 1e-15);
    }

    #[test]
    fn singleton_is_conjugation_by_that_key() {
        for idx in 0..16 {
            let key = PauliKey::from_index(2, idx).unwrap();
            let rho = random_rho(2, idx);
            let p = key_matrix(&key).unwrap();
            let expected = DensityMatrix::from_matrix(&p * rho.matrix() * p.adjoint()).unwrap();
            let set = KeySet::singleton(key);
            assert!(channel_apply_average(&set, &rho).unwrap().max_abs_diff(&expected).unwrap() < 1e-12);
            assert!(channel_apply_spectral(&set, &rho).unwrap().max_abs_diff(&expected).unwrap() < 1e-12);
        }
    }

    #[test]
    fn average_and_spectral_agree() {
        for trial in 0..50u64 {
            let n = 1 + (trial as usize % 3);
            let set = random_set(n, 1 + (trial as usize * 5) % 30, trial);
            let rho = random_rho(n, 500 + trial);
            let avg = channel_apply_average(&set, &rho).unwrap();
            let spec = channel_apply_spectral(&set, &rho).unwrap();
            assert!(avg.max_abs_diff(&spec).unwrap() < 1e-12, "trial {trial}");
            avg.validate().unwrap();
            assert!((avg.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let set = KeySet::full(2).unwrap();
        let rho = random_rho(3, 0);
        assert!(matches!(channel_apply_average(&set, &rho), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(channel_apply_spectral(&set, &rho), Err(Error::DimensionMismatch { .. })));
        assert!(ChannelSpec::new(vec![]).is_err());
        assert!(ChannelSpec::new(vec![KeySet::full(1).unwrap(), KeySet::full(2).unwrap()]).is_err());
    }

    #[test]
    fn compose_apply_equals_sequential_application() {
        for seed in 0..10 {
            let hops: Vec<KeySet> = (0..3).map(|j| random_set(2, 4 + j, seed * 10 + j as u64)).collect();
            let rho = random_rho(2, seed);
            let mut seq = rho.clone();
            for h in &hops {
                seq = channel_apply_average(h, &seq).unwrap();
            }
            let spec = ChannelSpec::new(hops).unwrap();
            assert!(compose_apply(&spec, &rho).unwrap().max_abs_diff(&seq).unwrap() < 1e-12);
        }
        let one = random_set(3, 9, 4);
        let rho = random_rho(3, 8);
        let via_spec = compose_apply(&ChannelSpec::single(one.clone()), &rho).unwrap();
        assert!(via_spec.max_abs_diff(&channel_apply_average(&one, &rho).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn two_singletons_act_as_their_product() {
        let k1 = PauliKey::from_index(2, 0b0110).unwrap();
        let k2 = PauliKey::from_index(2, 0b1011).unwrap();
        let spec = ChannelSpec::new(vec![KeySet::singleton(k1), KeySet::singleton(k2)]).unwrap();
        let prod = compose(&PhasedPauli::new(k2), &PhasedPauli::new(k1)).unwrap();
        let p = prod.matrix().unwrap();
        let rho = random_rho(2, 21);
        let expected = DensityMatrix::from_matrix(&p * rho.matrix() * p.adjoint()).unwrap();
        assert!(compose_apply(&spec, &rho).unwrap().max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn composed_bias_is_product_of_hop_biases() {
        // Brute force: the composed map averages over all key tuples, i.e.
        // over the XOR-sumset multiset; its character sums are computed
        // directly and compared with the pointwise product.
        for seed in 0..5 {
            let hops: Vec<KeySet> = (0..3).map(|j| random_set(2, 3 + j, 90 + seed * 3 + j as u64)).collect();
            let mut sumset = Vec::new();
            for x in hops[0].keys() {
                for y in hops[1].keys() {
                    for z in hops[2].keys() {
                        sumset.push(x.xor(y).unwrap().xor(z).unwrap());
                    }
                }
            }
            let brute = super::super::bias::bias_profile_direct(&KeySet::new(2, sumset).unwrap()).unwrap();
            let product = ChannelSpec::new(hops).unwrap().composed_signed_bias().unwrap();
            for (i, v) in product.iter().enumerate() {
                assert!((v - brute.signed_at(i)).abs() < 1e-12);
            }
        }
    }
}
