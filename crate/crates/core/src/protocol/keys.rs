use rand::Rng as _;

use super::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::pauli::{compose_sequence, PauliKey, PhasedPauli};
use crate::rng::{self, domain};

/// One key per party, `K^{A_1} ⊕ ⋯ ⊕ K^{A_m} = 0` when generated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatedKeys {
    keys: Vec<PauliKey>,
}

impl CorrelatedKeys {
    pub fn from_keys(keys: Vec<PauliKey>) -> Result<Self> {
        let first = keys.first().ok_or(Error::EmptyKeySet)?;
        if let Some(bad) = keys.iter().find(|k| k.n() != first.n()) {
            return Err(Error::QubitMismatch(first.n(), bad.n()));
        }
        Ok(CorrelatedKeys { keys })
    }

    pub fn keys(&self) -> &[PauliKey] {
        &self.keys
    }

    pub fn parties(&self) -> usize {
        self.keys.len()
    }

    pub fn xor_total(&self) -> PauliKey {
        self.keys[1..].iter().fold(self.keys[0], |acc, k| acc.xor(k).expect("uniform n"))
    }

    pub fn xor_is_zero(&self) -> bool {
        self.xor_total().is_identity()
    }

    /// `P_{K^{A_m}} ⋯ P_{K^{A_1}}` with its exact phase.
    pub fn operator_product(&self) -> PhasedPauli {
        let ops: Vec<PhasedPauli> = self.keys.iter().copied().map(PhasedPauli::new).collect();
        compose_sequence(&ops).expect("uniform n").expect("nonempty")
    }

    /// Copy with one bit of one party's key flipped (`party` is 1-based).
    pub fn with_flipped_bit(&self, party: usize, bit: usize) -> Result<Self> {
        if party == 0 || party > self.keys.len() {
            return Err(Error::Config(format!("no party {party} among {}", self.keys.len())));
        }
        let mut keys = self.keys.clone();
        keys[party - 1] = keys[party - 1].flip_bit(bit)?;
        Ok(CorrelatedKeys { keys })
    }
}

/// Parties `1..m−1` draw uniformly from their hop's key set; party `m`
/// takes the XOR of the others.
pub fn keygen_correlated(config: &ProtocolConfig) -> CorrelatedKeys {
    keygen_correlated_run(config, 0)
}

/// As [`keygen_correlated`] for the `run`-th independent run under the
/// config's seed.
pub fn keygen_correlated_run(config: &ProtocolConfig, run: u64) -> CorrelatedKeys {
    let mut rng = rng::stream(config.seed(), domain::KEYGEN, run);
    let mut keys: Vec<PauliKey> = config
        .hop_sets()
        .iter()
        .map(|set| set.keys()[rng.random_range(0..set.len())])
        .collect();
    let last = keys[1..].iter().fold(keys[0], |acc, k| acc.xor(k).expect("uniform n"));
    keys.push(last);
    CorrelatedKeys { keys }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::config::HopKeys;
    use crate::randomizer::KeySet;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn three_party_keys_xor_to_zero() {
        let cfg = ProtocolConfig::build(3, 3, 0.5, 9, HopKeys::Sampled).unwrap();
        for run in 0..200 {
            let keys = keygen_correlated_run(&cfg, run);
            assert_eq!(keys.parties(), 3);
            assert!(keys.xor_is_zero());
            let prod = keys.operator_product();
            assert!(prod.key.is_identity());
        }
    }

    #[test]
    fn two_party_receiver_key_equals_sender_key() {
        let cfg = ProtocolConfig::build(2, 2, 0.5, 4, HopKeys::Sampled).unwrap();
        for run in 0..50 {
            let keys = keygen_correlated_run(&cfg, run);
            assert_eq!(keys.keys()[0], keys.keys()[1]);
        }
    }

    #[test]
    fn first_party_keys_are_uniform_over_the_hop_set() {
        // Hop set with 8 distinct keys; 10⁴ seeds; χ² goodness of fit.
        let keys = (0..8).map(|i| PauliKey::from_index(2, i * 2 + 1).unwrap()).collect();
        let set = KeySet::new(2, keys).unwrap();
        let mut counts = [0u64; 8];
        let trials = 10_000;
        for seed in 0..trials {
            let cfg = ProtocolConfig::build(
                3,
                2,
                0.5,
                seed,
                HopKeys::Given(vec![(set.clone(), "t".into()), (set.clone(), "t".into())]),
            )
            .unwrap();
            let k = keygen_correlated(&cfg).keys()[0];
            counts[((k.index() - 1) / 2) as usize] += 1;
        }
        let expected = trials as f64 / 8.0;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new(7.0).unwrap().cdf(stat);
        assert!(p > 0.001, "chi2 {stat}, p {p}");
    }

    #[test]
    fn flipping_a_bit_breaks_the_xor() {
        let cfg = ProtocolConfig::build(4, 2, 0.5, 1, HopKeys::Sampled).unwrap();
        let keys = keygen_correlated(&cfg);
        let broken = keys.with_flipped_bit(4, 0).unwrap();
        assert!(!broken.xor_is_zero());
        assert!(keys.with_flipped_bit(5, 0).is_err());
        assert!(keys.with_flipped_bit(1, 4).is_err());
    }
}
