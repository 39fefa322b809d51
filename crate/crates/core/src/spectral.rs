//! Discrete Fourier transforms and Fourier-multiplier operators.
//!
//! Normalization: the forward transform carries `1/n`, so `û_0` is the mean
//! of `u` and `u_j = sum_m û_m e^{i k_m x_j}`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::field::ComplexField;
use crate::grid::Grid;

/// Fourier coefficients of a field, in FFT slot order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.n_points(), "spectrum length mismatch");
        Spectrum { grid, coeffs }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.n_points();
        Spectrum::new(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of signed mode `m`, zero if unrepresentable.
    pub fn mode(&self, m: i64) -> Complex64 {
        self.grid
            .slot_of(m)
            .map_or(Complex64::new(0.0, 0.0), |s| self.coeffs[s])
    }

    /// Multiplies slot `j` by `symbol(k_j)`.
    pub fn apply(&mut self, symbol: impl Fn(f64) -> Complex64) {
        for (c, &k) in self.coeffs.iter_mut().zip(self.grid.wavenumbers()) {
            *c *= symbol(k);
        }
    }

    /// L2 norm evaluated on the coefficients (Parseval: `L * sum |û|^2`).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }
}

pub fn forward_dft(u: &ComplexField) -> Spectrum {
    let grid = u.grid().clone();
    let mut buf = u.values().to_vec();
    grid.fft_forward(&mut buf);
    let scale = 1.0 / grid.n_points() as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    Spectrum { grid, coeffs: buf }
}

pub fn inverse_dft(spec: &Spectrum) -> ComplexField {
    let mut buf = spec.coeffs.clone();
    spec.grid.fft_inverse(&mut buf);
    ComplexField::from_raw(spec.grid.clone(), buf)
}

/// `F^{-1}[ symbol(k) F[u] ]`.
pub fn apply_multiplier(u: &ComplexField, symbol: impl Fn(f64) -> Complex64) -> ComplexField {
    let mut s = forward_dft(u);
    s.apply(symbol);
    inverse_dft(&s)
}

/// `D^{1/2}`: multiplier `|k|^{1/2}`. Even symbol, so the Nyquist mode is kept.
pub fn half_derivative(u: &ComplexField) -> ComplexField {
    apply_multiplier(u, |k| Complex64::new(k.abs().sqrt(), 0.0))
}

/// `D = sqrt(-Δ)`: multiplier `|k|`.
pub fn abs_derivative(u: &ComplexField) -> ComplexField {
    apply_multiplier(u, |k| Complex64::new(k.abs(), 0.0))
}

/// Spectral first derivative `∂_x`. The symbol `ik` is odd, so the Nyquist
/// mode is zeroed.
pub fn derivative(u: &ComplexField) -> ComplexField {
    let nyquist = u.grid().n_points() / 2;
    let mut s = forward_dft(u);
    s.apply(|k| Complex64::new(0.0, k));
    s.coeffs_mut()[nyquist] = Complex64::new(0.0, 0.0);
    inverse_dft(&s)
}

/// Free Schrödinger group `U(t)` solving `u_t + i u_xx = 0`.
///
/// `u_t = -i u_xx` and `∂_xx -> -k^2` give `û_t = +i k^2 û`, hence the symbol
/// `e^{+i k^2 t}`.
pub fn free_propagator(u0: &ComplexField, t: f64) -> ComplexField {
    apply_multiplier(u0, |k| Complex64::from_polar(1.0, k * k * t))
}

/// Largest coefficient modulus outside the central two thirds of the band,
/// relative to the largest coefficient overall. Zero for the zero field.
pub fn spectral_tail_ratio(u: &ComplexField) -> f64 {
    let s = forward_dft(u);
    let n = s.grid.n_points() as i64;
    let cutoff = n / 3;
    let mut peak = 0.0f64;
    let mut tail = 0.0f64;
    for (slot, c) in s.coeffs.iter().enumerate() {
        let a = c.norm();
        peak = peak.max(a);
        if Grid::signed_index(slot, n as usize).abs() > cutoff {
            tail = tail.max(a);
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        tail / peak
    }
}

/// 2/3-rule truncation: zeroes every mode with `|m| > n/3`.
pub fn dealias_two_thirds(u: &ComplexField) -> ComplexField {
    let mut s = forward_dft(u);
    let n = s.grid.n_points();
    let cutoff = (n / 3) as i64;
    for (slot, c) in s.coeffs.iter_mut().enumerate() {
        if Grid::signed_index(slot, n).abs() > cutoff {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    inverse_dft(&s)
}
