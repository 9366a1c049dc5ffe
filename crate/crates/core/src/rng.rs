//! Seeded randomness. Every random draw in the toolkit comes from a
//! ChaCha stream keyed by one 64-bit seed; independent purposes and trial
//! indices get their own stream ids so results do not depend on the order
//! (or thread) in which draws happen.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream-id domains.
pub mod domain {
    pub const STATE: u64 = 1;
    pub const KEYSET: u64 = 2;
    pub const KEYGEN: u64 = 3;
    pub const TRIALS: u64 = 4;
    pub const INPUT: u64 = 5;
}

/// Generator for `(seed, domain, index)`.
pub fn stream(seed: u64, domain: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(domain.rotate_left(40) ^ index);
    rng
}
