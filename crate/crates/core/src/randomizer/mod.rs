//! Key sets, their bias profiles, and the randomizing channels they define.

mod bias;
mod certify;
mod channel;
mod keyset;

pub use bias::{bias, bias_profile, bias_profile_direct, signed_bias, BiasProfile};
pub use certify::{
    bias_threshold, certify, dn_key_length, per_hop_threshold, sample_and_certify, sample_and_certify_hop,
    sample_key_set, verify_epsilon, Certificate, Certified, CertifyOutcome, CertifyParams, VerificationReport,
};
pub(crate) use certify::sample_outputs;
pub(crate) use channel::apply_multipliers;
pub use channel::{channel_apply_average, channel_apply_spectral, compose_apply, ChannelSpec};
pub use keyset::{KeySet, KeySetMeta, BIAS_CAP_BITS};
