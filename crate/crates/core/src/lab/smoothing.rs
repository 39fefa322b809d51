//! Half-derivative smoothing in `L^∞_x L^2_t`, for the free group and for
//! the undamped, unforced nonlinear flow.

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::field::{l2_norm, ComplexField, SpaceTimeField};
use crate::norms::mixed_linf_x_l2_t;
use crate::solver::{integrate, SolverParams};
use crate::spectral::{free_propagator, half_derivative};

/// `||D^{1/2} u||_{L^∞_x L^2_T}` evaluated framewise on a trajectory.
pub fn smoothing_norm(traj: &SpaceTimeField) -> f64 {
    mixed_linf_x_l2_t(&traj.map_frames(half_derivative))
}

/// Samples `U(t) u0` at `t = 0, dt_sample, .., t_final`.
pub fn free_trajectory(u0: &ComplexField, t_final: f64, dt_sample: f64) -> Result<SpaceTimeField> {
    if !(dt_sample > 0.0 && t_final >= dt_sample) {
        return Err(NlsError::InvalidParameter(format!(
            "need 0 < dt_sample <= t_final, got {dt_sample} and {t_final}"
        )));
    }
    let n = (t_final / dt_sample).round() as usize;
    let frames = (0..=n)
        .map(|i| free_propagator(u0, i as f64 * dt_sample))
        .collect();
    SpaceTimeField::new(dt_sample, 0.0, frames)
}

/// `||D^{1/2} U(t) u0||_{L^∞_x L^2_T} / ||u0||`, the empirical constant of
/// the linear smoothing estimate.
pub fn empirical_kato_constant(u0: &ComplexField, t_final: f64, dt_sample: f64) -> Result<f64> {
    let n0 = l2_norm(u0);
    if n0 == 0.0 {
        return Ok(0.0);
    }
    Ok(smoothing_norm(&free_trajectory(u0, t_final, dt_sample)?) / n0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingRow {
    pub lambda: f64,
    pub norm: f64,
    /// `norm / (λ||u0|| + λ^3 ||u0||^3)`, 0 when the denominator is 0.
    pub fitted_c: f64,
}

/// Integration settings for [`smoothing_ratio`].
#[derive(Clone, Copy, Debug)]
pub struct SmoothingRun {
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
}

/// For each `λ`, integrates `λ u0` with `γ = 0, f = 0` and fits the constant
/// in `||D^{1/2} u||_{L^∞_x L^2_T} <= c (||λu0|| + ||λu0||^3)`.
pub fn smoothing_ratio(
    u0: &ComplexField,
    run: SmoothingRun,
    scale_list: &[f64],
) -> Result<Vec<SmoothingRow>> {
    let params = SolverParams::free(u0.grid().clone(), run.dt, run.t_final)?
        .with_record_every(run.record_every)?;
    let n0 = l2_norm(u0);
    scale_list
        .iter()
        .map(|&lambda| {
            if lambda == 0.0 || n0 == 0.0 {
                return Ok(SmoothingRow {
                    lambda,
                    norm: 0.0,
                    fitted_c: 0.0,
                });
            }
            let data = u0.scaled(Complex64::new(lambda, 0.0));
            let traj = integrate(&data, &params)?.trajectory;
            let norm = smoothing_norm(&traj);
            let a = lambda.abs() * n0;
            Ok(SmoothingRow {
                lambda,
                norm,
                fitted_c: norm / (a + a * a * a),
            })
        })
        .collect()
}

/// `max fitted_c / min fitted_c` over rows with `λ != 0`.
pub fn fitted_spread(rows: &[SmoothingRow]) -> f64 {
    let cs: Vec<f64> = rows
        .iter()
        .filter(|r| r.lambda != 0.0)
        .map(|r| r.fitted_c)
        .collect();
    let max = cs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}
