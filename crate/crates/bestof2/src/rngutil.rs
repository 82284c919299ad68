//! Deterministic random-stream derivation.
//!
//! Every stochastic run draws from a ChaCha8 generator seeded by hashing
//! `(master_seed, run_index)` through SplitMix64. Streams for distinct run
//! indices are therefore independent, reproducible, and insensitive to
//! scheduling: batches can execute in any order (or in parallel) and still
//! produce bit-identical per-run results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of the SplitMix64 output function; a bijective 64-bit mixer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives the substream seed for run `run_index` of a batch.
pub fn seed_for_run(master_seed: u64, run_index: u64) -> u64 {
    // Two mixing rounds so that (master, index) pairs differing in either
    // argument land far apart even for small consecutive values.
    splitmix64(splitmix64(master_seed).wrapping_add(run_index))
}

/// ChaCha8 stream for a derived seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ChaCha8 stream for run `run_index` under `master_seed`.
pub fn rng_for_run(master_seed: u64, run_index: u64) -> ChaCha8Rng {
    rng_from_seed(seed_for_run(master_seed, run_index))
}
