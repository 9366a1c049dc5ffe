//! Simulation and analysis of sequential multi-party transmission of
//! quantum states through Pauli-keyed approximate private channels.
//!
//! - [`pauli`]: exact algebra of n-qubit Pauli operators named by 2n-bit keys.
//! - [`state`]: dense states, norms, entropy and the Pauli-basis expansion.
//! - [`randomizer`]: key sets, bias profiles and the randomizing channels they define.
//! - [`security`]: Holevo accounting and distinguishability.
//! - [`protocol`]: correlated keys, the node chain, the message bus and security reports.

pub mod error;
pub mod json;
pub mod pauli;
pub mod protocol;
pub mod randomizer;
pub mod rng;
pub mod security;
pub mod state;
pub mod walsh;

pub use error::{Error, Result};
