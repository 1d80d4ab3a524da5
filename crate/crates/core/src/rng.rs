//! Seeded random-number streams.
//!
//! All randomized code in this crate draws from [`ChaCha8Rng`] instances
//! created through [`stream_rng`]. Each logical stage of an experiment
//! (tester stream, learner stream, holdout stream, support construction, ...)
//! gets its own named stream derived from the experiment seed, so stages are
//! statistically independent and every run is reproducible from a single
//! 64-bit seed.
//!
//! Stream names used by this crate:
//! - `"tester"`    — examples consumed by a tester
//! - `"learner"`   — labeled examples consumed by a learner
//! - `"holdout"`   — fresh examples used only for error measurement
//! - `"support"`   — support-set construction in the fooling harness
//! - `"labels"`    — in-band label draws in the fooling harness
//!
//! Per-trial seeds are derived as `seed ^ trial_index` before stream
//! derivation, so trials can run concurrently in any order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mix a 64-bit value through the SplitMix64 finalizer.
///
/// Used to decorrelate nearby seeds (e.g. `seed ^ 0`, `seed ^ 1`, ...) before
/// they key a generator.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a hash of a byte string; used to turn stream names into seeds.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Create the generator for a named stream of the experiment with `seed`.
///
/// Deterministic: the same `(seed, name)` always yields the same stream.
/// Distinct names yield independent streams for all practical purposes.
pub fn stream_rng(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ fnv1a(name.as_bytes())))
}

/// Seed for trial `trial` of an experiment with base `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}
