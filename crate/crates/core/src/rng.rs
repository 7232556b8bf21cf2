//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`] seeded through
//! `SeedableRng::seed_from_u64`, and floating-point variates are derived from
//! raw `u64` outputs with the formulas below rather than through `rand`'s
//! distribution machinery, so a port to another language can reproduce point
//! sets bit for bit:
//!
//! * uniform on `[0, 1)`: `(next_u64() >> 11) * 2^-53`
//! * standard normal: Box-Muller on two uniforms, `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`
//!   (the sine branch is discarded)
//! * integer below `m`: `floor(uniform * m)`
//!
//! Independent streams (one per K-means restart, for example) use ChaCha's
//! stream selector, so they do not depend on execution order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Portable seeded generator used throughout the crate.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator for stream `stream` of `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform variate on `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform variate on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..bound`. `bound` must be non-zero.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.uniform() * bound as f64) as usize).min(bound - 1)
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }
}
