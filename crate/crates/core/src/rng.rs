//! Seeded randomness with a fixed per-trial splitting rule.
//!
//! Every trial owns an independent ChaCha8 stream whose seed is derived from
//! `(master_seed, trial_index)` with splitmix64. Trials are therefore
//! order-independent: running trial 7 first or last draws the same numbers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The one RNG used everywhere measurement outcomes are sampled.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` under `master_seed`.
///
/// This is the closed form of the splitmix64 sequence started at
/// `master_seed`, so consecutive trials get decorrelated seeds without any
/// sequential state.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64_finalize(master_seed.wrapping_add(trial_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// RNG stream for one trial.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> SimRng {
    seeded(trial_seed(master_seed, trial_index))
}

/// RNG stream from a bare 64-bit seed.
pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
