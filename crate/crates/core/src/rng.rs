//! Seeded random streams.
//!
//! Every trial gets its own xoshiro256** stream whose seed is a SplitMix64
//! mix of the parent seed and a stable key, so results never depend on
//! iteration order or on how work is split across threads.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

pub type Stream = Xoshiro256StarStar;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed`, one SplitMix64 round per part.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// FNV-1a over the UTF-8 bytes; stable across platforms and releases.
pub fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn stream(seed: u64) -> Stream {
    Xoshiro256StarStar::seed_from_u64(seed)
}
