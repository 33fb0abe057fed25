//! Seeded random streams for simulation.
//!
//! Each replicate gets its own ChaCha8 stream keyed by a seed derived from a
//! base seed and a path of indices, so results do not depend on the order
//! in which replicates are executed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Generator used by every simulator in the crate.
pub type SimRng = ChaCha8Rng;

pub fn sim_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes `base` together with `path` into a new seed.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(base ^ 0x9e37_79b9_7f4a_7c15), |acc, &x| {
            mix64(acc.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ mix64(x))
        })
}

/// Uniform variate on the open interval (0, 1).
pub fn open_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    // 52 random bits centred in their cell are exact and never hit 0 or 1
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Unit-Fréchet variate by inversion, `-1 / log U`.
pub fn unit_frechet<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -1.0 / libm::log(open_uniform(rng))
}
