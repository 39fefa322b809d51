//! Complex fields on a [`Grid`] and time-sampled sequences of them.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::grid::Grid;

/// One complex-valued state `u(., t)` sampled on a grid.
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(NlsError::InvalidParameter(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|z| !z.is_finite()) {
            return Err(NlsError::InvalidParameter("field has non-finite entries".into()));
        }
        Ok(ComplexField { grid, values })
    }

    /// Length-checked only; callers guarantee finiteness.
    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        ComplexField { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.n_points();
        ComplexField::from_raw(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    /// Samples `f(x_j)` at every node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        ComplexField::new(grid, values)
    }

    /// `amp * exp(-(x - center)^2 / (2 width^2))`, with `x - center` measured
    /// periodically.
    pub fn gaussian(grid: Arc<Grid>, amp: f64, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(NlsError::InvalidParameter(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
        let g = grid.clone();
        ComplexField::from_fn(grid, move |x| {
            let d = g.periodic_offset(x, center);
            Complex64::new(amp * (-d * d / (2.0 * width * width)).exp(), 0.0)
        })
    }

    /// Plane wave `amp * e^{i k_m x}`.
    pub fn plane_wave(grid: Arc<Grid>, amp: Complex64, mode: i64) -> Self {
        let k = grid.wavenumber_of(mode);
        let values = grid.nodes().map(|x| amp * Complex64::from_polar(1.0, k * x)).collect();
        ComplexField::from_raw(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.is_finite())
    }

    pub fn ensure_same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(NlsError::IncompatibleGrids)
        }
    }

    pub fn scaled(&self, c: Complex64) -> ComplexField {
        let values = self.values.iter().map(|z| z * c).collect();
        ComplexField::from_raw(self.grid.clone(), values)
    }

    pub fn add(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product, used for modulations and windows.
    pub fn mul(&self, other: &ComplexField) -> Result<ComplexField> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(
        &self,
        other: &ComplexField,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexField> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(ComplexField::from_raw(self.grid.clone(), values))
    }

    /// Largest pointwise modulus.
    pub fn linf(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Squared L2 norm `sum |u_j|^2 dx`.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }
}

/// `(u, v) = sum_j u(x_j) conj(v(x_j)) dx`.
pub fn inner_product(u: &ComplexField, v: &ComplexField) -> Result<Complex64> {
    u.ensure_same_grid(v)?;
    let s: Complex64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b.conj()).sum();
    Ok(s * u.grid.dx())
}

pub fn l2_norm(u: &ComplexField) -> f64 {
    u.mass().sqrt()
}

/// Which equation a recorded trajectory came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMeta {
    pub gamma: f64,
    pub forcing_norm: f64,
}

/// Uniformly sampled trajectory `u(t0 + i * dt_sample)`.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    grid: Arc<Grid>,
    dt_sample: f64,
    t0: f64,
    frames: Vec<ComplexField>,
    meta: Option<RunMeta>,
}

impl SpaceTimeField {
    pub fn new(dt_sample: f64, t0: f64, frames: Vec<ComplexField>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| NlsError::InvalidParameter("trajectory has no frames".into()))?;
        if !(dt_sample > 0.0 && dt_sample.is_finite()) {
            return Err(NlsError::InvalidParameter(format!(
                "dt_sample must be positive, got {dt_sample}"
            )));
        }
        let grid = first.grid.clone();
        if frames.iter().any(|f| !f.grid.same_as(&grid)) {
            return Err(NlsError::IncompatibleGrids);
        }
        Ok(SpaceTimeField {
            grid,
            dt_sample,
            t0,
            frames,
            meta: None,
        })
    }

    pub fn with_meta(mut self, meta: RunMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dt_sample(&self) -> f64 {
        self.dt_sample
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn meta(&self) -> Option<RunMeta> {
        self.meta
    }

    pub fn frames(&self) -> &[ComplexField] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt_sample
    }

    /// Length of the sampled window, `(frames - 1) * dt_sample`.
    pub fn duration(&self) -> f64 {
        (self.frames.len() - 1) as f64 * self.dt_sample
    }

    /// Index of the frame recorded at time `t`, if `t` hits the sampling
    /// lattice (relative tolerance 1e-9 of a sample step).
    pub fn index_at(&self, t: f64) -> Option<usize> {
        let pos = (t - self.t0) / self.dt_sample;
        let idx = pos.round();
        if (pos - idx).abs() > 1e-9 || idx < 0.0 || idx as usize >= self.frames.len() {
            None
        } else {
            Some(idx as usize)
        }
    }

    /// Applies `op` framewise, keeping the sampling.
    pub fn map_frames(&self, op: impl Fn(&ComplexField) -> ComplexField) -> SpaceTimeField {
        SpaceTimeField {
            grid: self.grid.clone(),
            dt_sample: self.dt_sample,
            t0: self.t0,
            frames: self.frames.iter().map(op).collect(),
            meta: self.meta,
        }
    }

    /// Trapezoid weights in time: `dt/2` on the end frames, `dt` inside.
    pub fn time_weights(&self) -> Vec<f64> {
        let n = self.frames.len();
        (0..n)
            .map(|i| {
                if n == 1 {
                    0.0
                } else if i == 0 || i == n - 1 {
                    0.5 * self.dt_sample
                } else {
                    self.dt_sample
                }
            })
            .collect()
    }
}
