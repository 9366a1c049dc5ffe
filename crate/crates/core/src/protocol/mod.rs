//! The m-party chain: correlated keys, node-by-node encoding over a
//! deterministic bus, final decode, and what an adversary on each link sees.

mod bus;
mod config;
mod keys;
mod report;
mod run;

pub use bus::{bus_deliver, Bus, Capture, DeliveryRecord, DeliverySchedule, Envelope};
pub use config::{HopKeys, HopProvenance, ProtocolConfig};
pub use keys::{keygen_correlated, keygen_correlated_run, CorrelatedKeys};
pub use report::{
    security_report, ComposedSecurity, ConfigEcho, HopEntry, HopSecurity, ProtocolSecurityReport, TranscriptDocument,
};
pub use run::{
    eavesdropper_state, empirical_eavesdropper_state, idealized_composed_state, run_protocol, run_with_keys,
    HopRecord, Outcome, RunOptions, Transcript, DECODE_TOL,
};
