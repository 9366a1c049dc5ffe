use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::randomizer::{certify, ChannelSpec, CertifyParams, KeySet, KeySetMeta, sample_key_set};
use crate::randomizer::{bias_profile, dn_key_length};
use crate::rng::{self, domain};

/// Where the per-hop key sets come from.
#[derive(Clone, Debug)]
pub enum HopKeys {
    /// Explicit sets, one per hop, each labelled with its origin.
    Given(Vec<(KeySet, String)>),
    /// Sample `2^{n_DN(n, ε^{1/m})}` keys per hop and certify each at the
    /// per-hop threshold.
    Certified { max_retries: usize },
    /// Sample per-hop sets of the same size without certification.
    Sampled,
    /// Every hop uses all of `{0,1}^{2n}`.
    Full,
}

/// Origin and fingerprint of one hop's key set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopProvenance {
    pub hop: usize,
    pub source: String,
    /// SHA-256 of the set's canonical JSON file form.
    pub sha256: String,
    pub size: usize,
    pub beta_max: f64,
    pub certified: bool,
}

/// An `m`-party chain: `m − 1` hops, one key set per hop.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    parties: usize,
    n: usize,
    epsilon: f64,
    seed: u64,
    channel: ChannelSpec,
    provenance: Vec<HopProvenance>,
}

impl ProtocolConfig {
    pub fn build(parties: usize, n: usize, epsilon: f64, seed: u64, keys: HopKeys) -> Result<Self> {
        if parties < 2 {
            return Err(Error::Config(format!("need at least 2 parties, got {parties}")));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        let hops = parties - 1;
        let labelled: Vec<(KeySet, String)> = match keys {
            HopKeys::Given(sets) => {
                if sets.len() != hops {
                    return Err(Error::Config(format!(
                        "{parties} parties need {hops} hop key sets, got {}",
                        sets.len()
                    )));
                }
                sets
            }
            HopKeys::Certified { max_retries } => (1..=hops)
                .map(|hop| {
                    let params = CertifyParams::hop(n, epsilon, parties, hop, seed, max_retries)?;
                    let outcome = certify(&params)?;
                    if !outcome.certified {
                        return Err(Error::CertificationFailed {
                            attempts: max_retries + 1,
                            best_beta_max: outcome.best.profile.beta_max(),
                            threshold: params.threshold,
                        });
                    }
                    Ok((outcome.best.set, "sampled-certified".to_string()))
                })
                .collect::<Result<_>>()?,
            HopKeys::Sampled => {
                let size_bits = dn_key_length(n, epsilon.powf(1.0 / parties as f64))?;
                (1..=hops)
                    .map(|hop| {
                        let mut rng = rng::stream(seed, domain::KEYSET, (hop as u64) << 32);
                        Ok((sample_key_set(n, 1 << size_bits, &mut rng)?, "sampled".to_string()))
                    })
                    .collect::<Result<_>>()?
            }
            HopKeys::Full => {
                let full = KeySet::full(n)?;
                (0..hops).map(|_| (full.clone(), "full".to_string())).collect()
            }
        };
        if let Some((bad, _)) = labelled.iter().find(|(s, _)| s.n() != n) {
            return Err(Error::QubitMismatch(n, bad.n()));
        }
        let threshold = crate::randomizer::per_hop_threshold(n, epsilon, parties);
        let mut provenance = Vec::with_capacity(hops);
        let mut sets = Vec::with_capacity(hops);
        for (i, (mut set, source)) in labelled.into_iter().enumerate() {
            let beta_max = bias_profile(&set)?.beta_max();
            let certified = beta_max <= threshold;
            if set.meta == KeySetMeta::default() {
                set.meta = KeySetMeta { epsilon: None, certified: false, beta_max: Some(beta_max) };
            }
            let sha256 = hex::encode(Sha256::digest(set.to_json()?.as_bytes()));
            provenance.push(HopProvenance { hop: i + 1, source, sha256, size: set.len(), beta_max, certified });
            sets.push(set);
        }
        Ok(ProtocolConfig { parties, n, epsilon, seed, channel: ChannelSpec::new(sets)?, provenance })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn hop_count(&self) -> usize {
        self.parties - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn hop_sets(&self) -> &[KeySet] {
        self.channel.hops()
    }

    /// All hops composed, first hop acting first.
    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    pub fn provenance(&self) -> &[HopProvenance] {
        &self.provenance
    }

    /// `ε^{1/m}·2^{−n/(2m)}`.
    pub fn per_hop_threshold(&self) -> f64 {
        crate::randomizer::per_hop_threshold(self.n, self.epsilon, self.parties)
    }

    pub fn all_hops_certified(&self) -> bool {
        self.provenance.iter().all(|p| p.certified)
    }
}
