//! Portable pseudo-random source for reproducible initial data.
//!
//! 64-bit linear congruential generator
//! `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
//! seeded with `state = seed`. Each draw advances the state once and returns
//! the new state; doubles take its top 53 bits: `(state >> 11) / 2^53`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::field::{l2_norm, ComplexField};
use crate::grid::Grid;

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Highest mode index used by [`random_smooth_field`].
pub const RANDOM_FIELD_MODES: i64 = 8;

/// Random smooth, localized field with L2 norm `norm`.
///
/// Draws `(re, im)` pairs from `next_signed` for modes `m = -8..=8` in order,
/// sums `c_m e^{i k_m x}` and multiplies by a unit Gaussian window of width
/// `L/16` centred at `L/2`, then rescales to the requested norm.
pub fn random_smooth_field(grid: Arc<Grid>, rng: &mut Lcg, norm: f64) -> ComplexField {
    let coeffs: Vec<(f64, Complex64)> = (-RANDOM_FIELD_MODES..=RANDOM_FIELD_MODES)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / grid.length();
            (k, Complex64::new(rng.next_signed(), rng.next_signed()))
        })
        .collect();
    let width = grid.length() / 16.0;
    let center = 0.5 * grid.length();
    let values: Vec<Complex64> = grid
        .nodes()
        .map(|x| {
            let d = grid.periodic_offset(x, center);
            let window = (-d * d / (2.0 * width * width)).exp();
            let s: Complex64 = coeffs
                .iter()
                .map(|&(k, c)| c * Complex64::from_polar(1.0, k * x))
                .sum();
            s * window
        })
        .collect();
    let raw = ComplexField::from_raw(grid, values);
    let n0 = l2_norm(&raw);
    if n0 == 0.0 {
        raw
    } else {
        raw.scaled(Complex64::new(norm / n0, 0.0))
    }
}
