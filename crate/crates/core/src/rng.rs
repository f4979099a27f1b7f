//! Seed derivation and stream splitting.
//!
//! Every stochastic component draws from a ChaCha12 generator whose 64-bit
//! seed is derived from the experiment master seed by a fixed SplitMix64
//! mixing chain. The rule is:
//!
//! ```text
//! sub_seed = splitmix(splitmix(master) ^ part_1) ^ part_2 ...
//! ```
//!
//! where the parts are, in order, a stream tag and any indices (trial index,
//! instance index). Trial seeds deliberately do not include the sweep-point
//! or scheme identity: every scheme and every sweep value at a given trial
//! index sees the same deployment randomness, which pairs the comparisons
//! (common random numbers).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream tags keep independent consumers of one trial seed decorrelated.
pub mod stream {
    pub const SCENARIO: u64 = 0x5343_454e;
    pub const CHANNELS: u64 = 0x4348_414e;
    pub const RANDOM_MATCHING: u64 = 0x524d_5348;
    pub const COALITION_SHUFFLE: u64 = 0x4f43_4641;
}

/// One round of SplitMix64.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from `master` and an ordered list of parts.
pub fn mix(master: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &part in parts {
        state = splitmix64(state ^ part);
    }
    state
}

/// Seed for trial number `trial` of an experiment. Scheme- and
/// sweep-point-independent by design.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix(master, &[trial])
}

/// ChaCha12 generator for one named stream of a seed.
pub fn stream_rng(seed: u64, tag: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(mix(seed, &[tag]))
}
