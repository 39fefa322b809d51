//! Uniform periodic grid on `[0, L)` with cached FFT plans.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{NlsError, Result};

/// Periodic discretization of the line: `n_points` nodes `x_j = j * dx` on a
/// box of length `length`.
///
/// Wavenumbers are stored in FFT order (`0, 1, .., n/2-1, -n/2, .., -1`)
/// scaled by `2π/L`. The Nyquist entry carries `k = -π n / L`.
pub struct Grid {
    n_points: usize,
    length: f64,
    dx: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(n_points: usize, length: f64) -> Result<Arc<Self>> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(NlsError::InvalidGrid(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(NlsError::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        let wavenumbers = (0..n_points)
            .map(|j| 2.0 * PI * Self::signed_index(j, n_points) as f64 / length)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            n_points,
            length,
            dx: length / n_points as f64,
            wavenumbers,
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
        }))
    }

    /// Maps an FFT-order slot to its signed mode index in `[-n/2, n/2)`.
    pub fn signed_index(slot: usize, n_points: usize) -> i64 {
        if slot < n_points / 2 {
            slot as i64
        } else {
            slot as i64 - n_points as i64
        }
    }

    /// FFT-order slot of a signed mode index, if it is representable.
    pub fn slot_of(&self, mode: i64) -> Option<usize> {
        let half = (self.n_points / 2) as i64;
        if mode < -half || mode >= half {
            return None;
        }
        Some(if mode >= 0 {
            mode as usize
        } else {
            (mode + self.n_points as i64) as usize
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Wavenumber `2π m / L` of signed mode index `m`.
    pub fn wavenumber_of(&self, mode: i64) -> f64 {
        2.0 * PI * mode as f64 / self.length
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.x(j))
    }

    /// Signed distance from `center` to `x` folded into `[-L/2, L/2)`.
    pub fn periodic_offset(&self, x: f64, center: f64) -> f64 {
        let d = (x - center).rem_euclid(self.length);
        if d >= 0.5 * self.length {
            d - self.length
        } else {
            d
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_points == other.n_points && self.length == other.length
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points)
            .field("length", &self.length)
            .field("dx", &self.dx)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(4, 1.0).is_err());
        assert!(Grid::new(12, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, f64::NAN).is_err());
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        assert_eq!(g.wavenumbers(), &[0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        assert_eq!(g.dx() * g.n_points() as f64, g.length());
        assert_eq!(g.slot_of(-1), Some(7));
        assert_eq!(g.slot_of(4), None);
        assert_eq!(g.slot_of(-4), Some(4));
    }

    #[test]
    fn periodic_offset_folds() {
        let g = Grid::new(16, 10.0).unwrap();
        assert!((g.periodic_offset(9.0, 0.0) + 1.0).abs() < 1e-14);
        assert!((g.periodic_offset(1.0, 9.5) - 1.5).abs() < 1e-14);
    }
}
