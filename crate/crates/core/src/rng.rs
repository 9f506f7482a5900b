//! Seed handling shared by the generator and the search.
//!
//! Random instances use [`SplitMix64`], a counter-based generator whose
//! `k`-th output depends only on `(seed, k)`:
//!
//! ```text
//! z = seed + (k + 1) * 0x9E3779B97F4A7C15          (wrapping)
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9          (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB          (wrapping)
//! out = z ^ (z >> 31)
//! ```
//!
//! A uniform double in `[0, 1)` is `(out >> 11) * 2^-53`.
//!
//! Search randomness comes from ChaCha8 streams keyed by a 64-bit seed
//! mixed with a tuple of stream coordinates, so every stochastic choice is
//! reproducible no matter how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based SplitMix64.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    seed: u64,
    counter: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// Output number `k` for `seed`, independent of any generator state.
    pub fn at(seed: u64, k: u64) -> u64 {
        mix(seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = Self::at(self.seed, self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Derives a 64-bit seed from a root seed and stream coordinates.
pub fn derive_seed(root: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(mix(root ^ GOLDEN_GAMMA), |acc, &c| {
        mix(acc ^ mix(c.wrapping_add(GOLDEN_GAMMA)))
    })
}

/// Independent ChaCha8 stream for the given coordinates.
pub fn stream(root: u64, coords: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, coords))
}
