//! Seeded random streams.
//!
//! Every random draw in the library goes through [`RngStream`], which wraps
//! ChaCha8 (`rand_chacha`). ChaCha output is specified bit-for-bit, and the
//! conversions below use only integer shifts and one multiply or a fixed
//! Box–Muller transform, so a seed produces the same values on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{param, Result};
use crate::linalg::Vector;

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for the same seed, selected by `tag`.
    ///
    /// Used to give problem generation and solver warm starts separate
    /// streams so that changing one never shifts the draws of the other.
    pub fn substream(seed: u64, tag: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(tag);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the closed interval `[0, 1]` with 53 bits of resolution.
    pub fn unit_closed(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (TWO_POW_53 - 1.0)
    }

    /// Uniform on `(0, 1]`, safe to pass to `ln`.
    fn unit_open_closed(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) / TWO_POW_53
    }

    /// One standard normal draw. Consumes exactly two 64-bit words.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.unit_open_closed();
        let u2 = self.unit_closed();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// `n` i.i.d. draws from `U[lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64, n: usize) -> Result<Vector> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return param(format!("uniform bounds must satisfy lo < hi, got [{lo}, {hi}]"));
        }
        Ok((0..n).map(|_| lo + (hi - lo) * self.unit_closed()).collect())
    }

    /// `n` i.i.d. draws from `N(mean, std²)`; each draw consumes two words.
    pub fn normal(&mut self, mean: f64, std: f64, n: usize) -> Result<Vector> {
        if !(std >= 0.0) || !std.is_finite() {
            return param(format!("normal standard deviation must be nonnegative, got {std}"));
        }
        Ok((0..n).map(|_| mean + std * self.standard_normal()).collect())
    }
}

/// `n` draws from `U[lo, hi]` out of `rng`.
pub fn draw_uniform(rng: &mut RngStream, lo: f64, hi: f64, n: usize) -> Result<Vector> {
    rng.uniform(lo, hi, n)
}

/// `n` draws from `N(mean, std²)` out of `rng`.
pub fn draw_normal(rng: &mut RngStream, mean: f64, std: f64, n: usize) -> Result<Vector> {
    rng.normal(mean, std, n)
}
