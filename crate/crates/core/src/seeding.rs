//! Derived random streams.
//!
//! Every independently schedulable unit of work (an SBTM cell, an experiment
//! seed, a prior sample) gets its own ChaCha stream keyed by the user seed and
//! a small tuple of integers, so results do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed`.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)))
}

pub fn stream(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, parts))
}

/// Stream tags, so that sibling streams of one seed never collide.
pub mod tag {
    pub const SBTM: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const PRIOR: u64 = 3;
    pub const GLOROT: u64 = 4;
    pub const NOISE: u64 = 5;
}
