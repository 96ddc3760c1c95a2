//! The one pseudo-random generator used for noise and synthetic corpora.
//!
//! Xoshiro256++ seeded through SplitMix64 is fully specified and portable,
//! so a seed reproduces the same corpus on any platform.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Prng = Xoshiro256PlusPlus;

/// Recorded in corpus manifests.
pub const PRNG_NAME: &str = "xoshiro256++/splitmix64";

pub fn seeded(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

/// Mixes a parent seed with a stream index (SplitMix64 finalizer) so that
/// per-recording generators are decorrelated.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
