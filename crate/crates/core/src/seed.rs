//! Deterministic seed derivation.
//!
//! Every Monte Carlo trial gets its own stream derived from the master seed,
//! so results never depend on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of splitmix64 (Steele, Lea & Flood).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `mix(master, stream)`: splitmix64 of the master, xored with the stream
/// index, mixed again. Distinct streams give unrelated seeds.
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Seed for trial `trial` of grid cell `cell`.
pub fn trial_seed(master: u64, cell: u64, trial: u64) -> u64 {
    mix_seed(mix_seed(master, cell), trial)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for(master: u64, cell: u64, trial: u64) -> ChaCha8Rng {
    rng_from(trial_seed(master, cell, trial))
}
