//! Seed handling.
//!
//! Every sampling routine takes an explicit `u64` seed and builds a
//! `ChaCha8Rng` from it. Independent streams (one per CSV row, per Pauli
//! term, per worker) are derived with [`derive_seed`], a SplitMix64 mix of
//! the base seed and the stream index, so results never depend on thread
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for all shot sampling.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of stream `stream` under base seed `base` (SplitMix64 finalizer).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
