//! Deterministic random numbers.
//!
//! Every random draw in the crate goes through an explicitly passed [`Rng`].
//! The generator is ChaCha8 seeded from a `u64`; normal variates come from
//! the ziggurat sampler of `rand_distr`. Sequences are stable for a given
//! build of this crate and its pinned dependency versions, not across
//! implementations.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for run `run_index` of a sweep rooted at `master_seed`.
///
/// This is the SplitMix64 step `mix(master_seed + (run_index + 1) * γ)`, the
/// `run_index`-th output of a SplitMix64 stream started at `master_seed`.
/// Since the mixer is a bijection and the pre-images are distinct for
/// distinct indices below 2^64, distinct indices always give distinct seeds.
pub fn derive_child_seed(master_seed: u64, run_index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(run_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Single-owner pseudo-random generator.
#[derive(Clone, Debug)]
pub struct Rng {
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Draws a standard normal variate from `rng`.
pub fn sample_standard_normal(rng: &mut Rng) -> f64 {
    rng.standard_normal()
}
