use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::bus::{Bus, Envelope};
use super::config::ProtocolConfig;
use super::keys::{keygen_correlated, keygen_correlated_run, CorrelatedKeys};
use crate::error::{Error, Result};
use crate::pauli::{apply_key, PauliKey, Phase};
use crate::randomizer::{apply_multipliers, compose_apply};
use crate::state::{DensityMatrix, PureState};

/// Fidelity at or above which the receiver's output counts as decoded.
pub const DECODE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Sender,
    Relay,
    Receiver,
}

enum NodeOutput {
    Forward(Envelope),
    Decoded(PureState),
}

/// One party: applies its key to what it holds and passes it on.
struct Node {
    id: usize,
    key: PauliKey,
    role: Role,
}

impl Node {
    fn start(&self, input: &PureState) -> Result<Envelope> {
        debug_assert_eq!(self.role, Role::Sender);
        let payload = apply_key(input, &self.key)?;
        Ok(Envelope { hop: self.id, from: self.id, to: self.id + 1, payload })
    }

    fn receive(&self, env: Envelope) -> Result<NodeOutput> {
        let state = apply_key(&env.payload, &self.key)?;
        Ok(match self.role {
            Role::Receiver => NodeOutput::Decoded(state),
            _ => NodeOutput::Forward(Envelope { hop: self.id, from: self.id, to: self.id + 1, payload: state }),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopRecord {
    pub hop: usize,
    pub sender: usize,
    pub receiver: usize,
    pub captured: bool,
    pub ciphertext: PureState,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub decoded: PureState,
    /// `|⟨Φ|out⟩|²`, global phase discarded.
    pub fidelity: f64,
    pub decoded_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transcript {
    pub parties: usize,
    pub n: usize,
    pub hops: Vec<HopRecord>,
    pub outcome: Outcome,
    pub keys_xor_zero: bool,
    /// Exact phase `λ` in `P_{K^{A_m}} ⋯ P_{K^{A_1}} = λ·P_{⊕K}`.
    pub key_product_phase: String,
    pub no_cloning_idealized: bool,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Links the adversary taps; `None` taps every link.
    pub taps: Option<Vec<usize>>,
}

/// Generates correlated keys and runs the chain on `input`.
pub fn run_protocol(config: &ProtocolConfig, input: &PureState) -> Result<Transcript> {
    run_with_keys(config, &keygen_correlated(config), input, &RunOptions::default())
}

/// Runs the chain with explicit per-party keys.
pub fn run_with_keys(
    config: &ProtocolConfig,
    keys: &CorrelatedKeys,
    input: &PureState,
    options: &RunOptions,
) -> Result<Transcript> {
    let m = config.parties();
    if keys.parties() != m {
        return Err(Error::Config(format!("{} keys for {m} parties", keys.parties())));
    }
    if keys.keys()[0].n() != config.n() {
        return Err(Error::QubitMismatch(config.n(), keys.keys()[0].n()));
    }
    if input.n() != config.n() {
        return Err(Error::DimensionMismatch { expected: 1 << config.n(), got: input.dim() });
    }
    let nodes: Vec<Node> = keys
        .keys()
        .iter()
        .enumerate()
        .map(|(i, &key)| Node {
            id: i + 1,
            key,
            role: match i + 1 {
                1 => Role::Sender,
                id if id == m => Role::Receiver,
                _ => Role::Relay,
            },
        })
        .collect();

    let taps = options.taps.clone().unwrap_or_else(|| (1..m).collect());
    let mut bus = Bus::new(m, taps)?;
    let mut hops = Vec::with_capacity(m - 1);
    bus.send(nodes[0].start(input)?)?;
    let mut decoded = None;
    while let Some(env) = bus.deliver_next() {
        let receiver = &nodes[env.to - 1];
        hops.push(HopRecord {
            hop: env.hop,
            sender: env.from,
            receiver: env.to,
            captured: false,
            ciphertext: env.payload.clone(),
        });
        match receiver.receive(env)? {
            NodeOutput::Forward(next) => bus.send(next)?,
            NodeOutput::Decoded(state) => decoded = Some(state),
        }
    }
    let schedule = bus.into_schedule();
    for (rec, d) in hops.iter_mut().zip(&schedule.deliveries) {
        rec.captured = d.captured;
    }
    let decoded = decoded.ok_or_else(|| Error::Topology("receiver never got the state".into()))?;
    let fidelity = input.fidelity(&decoded)?.min(1.0);
    let product: Phase = keys.operator_product().phase;
    Ok(Transcript {
        parties: m,
        n: config.n(),
        hops,
        outcome: Outcome { decoded, fidelity, decoded_ok: fidelity >= 1.0 - DECODE_TOL },
        keys_xor_zero: keys.xor_is_zero(),
        key_product_phase: product.to_string(),
        no_cloning_idealized: schedule.no_cloning_idealized,
    })
}

fn check_hop(config: &ProtocolConfig, hop: usize) -> Result<()> {
    if hop == 0 || hop > config.hop_count() {
        return Err(Error::InvalidHop { hop, max: config.hop_count() });
    }
    Ok(())
}

/// The adversary's average state on link `hop`: `(R_{E_hop} ∘ ⋯ ∘ R_{E_1})(ρ)`,
/// averaged over the independent keys of parties `1..=hop`.
pub fn eavesdropper_state(config: &ProtocolConfig, hop: usize, input: &DensityMatrix) -> Result<DensityMatrix> {
    check_hop(config, hop)?;
    compose_apply(&config.channel().prefix(hop)?, input)
}

/// Monte-Carlo version of [`eavesdropper_state`]: the average ciphertext
/// projector on link `hop` over `samples` independent key draws.
pub fn empirical_eavesdropper_state(
    config: &ProtocolConfig,
    hop: usize,
    input: &PureState,
    samples: usize,
) -> Result<DensityMatrix> {
    check_hop(config, hop)?;
    let dim = input.dim();
    let mut acc = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for run in 0..samples as u64 {
        let keys = keygen_correlated_run(config, run);
        let mut state = input.clone();
        for key in &keys.keys()[..hop] {
            state = apply_key(&state, key)?;
        }
        let v = DVector::from_column_slice(state.amplitudes());
        acc += &v * v.adjoint();
    }
    acc /= Complex64::new(samples as f64, 0.0);
    DensityMatrix::from_matrix(acc)
}

/// Idealized `m`-fold composition in which the final party's key is drawn
/// independently from its marginal (the XOR of `m − 1` independent hop
/// keys). Its multipliers are the squares of the hop-chain multipliers.
/// With the true, dependent final key the `m`-fold map is the identity.
pub fn idealized_composed_state(config: &ProtocolConfig, input: &DensityMatrix) -> Result<DensityMatrix> {
    let chain = config.channel().multipliers()?;
    let squared: Vec<f64> = chain.iter().map(|x| x * x).collect();
    apply_multipliers(input, &squared)
}
