//! Discrete space-time norms on recorded trajectories.
//!
//! Time integrals use the trapezoid rule on the frames, space integrals the
//! rectangle rule with weight `dx`. The sup in `x` is a grid max, which is a
//! lower bound for the continuum sup.

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::field::{inner_product, ComplexField, SpaceTimeField};
use crate::spectral::half_derivative;

#[derive(Clone, Debug, PartialEq)]
pub struct GridMeta {
    pub n_points: usize,
    pub length: f64,
    pub dt_sample: f64,
    pub duration: f64,
}

impl GridMeta {
    pub fn of(traj: &SpaceTimeField) -> Self {
        GridMeta {
            n_points: traj.grid().n_points(),
            length: traj.grid().length(),
            dt_sample: traj.dt_sample(),
            duration: traj.duration(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub name: String,
    pub value: f64,
    pub grid_meta: GridMeta,
}

impl NormReport {
    pub fn new(name: impl Into<String>, value: f64, traj: &SpaceTimeField) -> Self {
        NormReport {
            name: name.into(),
            value,
            grid_meta: GridMeta::of(traj),
        }
    }
}

/// `(∫∫ |u|^p dx dt)^{1/p}`.
pub fn lp_space_time(traj: &SpaceTimeField, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(NlsError::NotANorm(p));
    }
    let dx = traj.grid().dx();
    let total: f64 = traj
        .frames()
        .iter()
        .zip(traj.time_weights())
        .map(|(frame, w)| w * dx * frame.values().iter().map(|z| z.norm().powf(p)).sum::<f64>())
        .sum();
    Ok(total.powf(1.0 / p))
}

/// `L^∞_x L^2_t`: max over nodes of `(∫ |u(x, t)|^2 dt)^{1/2}`.
pub fn mixed_linf_x_l2_t(traj: &SpaceTimeField) -> f64 {
    let n = traj.grid().n_points();
    let mut acc = vec![0.0f64; n];
    for (frame, w) in traj.frames().iter().zip(traj.time_weights()) {
        for (a, z) in acc.iter_mut().zip(frame.values()) {
            *a += w * z.norm_sqr();
        }
    }
    acc.into_iter().fold(0.0, f64::max).sqrt()
}

/// Upper companion of [`mixed_linf_x_l2_t`] with the sup taken inside:
/// `(∫ max_x |u|^2 dt)^{1/2}`.
pub fn sup_inside_l2_t(traj: &SpaceTimeField) -> f64 {
    traj.frames()
        .iter()
        .zip(traj.time_weights())
        .map(|(frame, w)| w * frame.linf().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `L^2_T H^{1/2}(K)` with `K = [a, b]`: `D^{1/2}` is applied on the whole
/// box and then restricted to the nodes in `K`.
pub fn local_h_half_l2t(traj: &SpaceTimeField, k_interval: (f64, f64)) -> Result<f64> {
    let (a, b) = k_interval;
    let grid = traj.grid();
    if !(a < b) || a < 0.0 || b > grid.length() {
        return Err(NlsError::EmptyInterval(a, b));
    }
    let inside: Vec<usize> = (0..grid.n_points())
        .filter(|&j| (a..=b).contains(&grid.x(j)))
        .collect();
    if inside.is_empty() {
        return Err(NlsError::EmptyInterval(a, b));
    }
    let dx = grid.dx();
    let local_sq = |f: &ComplexField| -> f64 {
        inside.iter().map(|&j| f.values()[j].norm_sqr()).sum::<f64>() * dx
    };
    let total: f64 = traj
        .frames()
        .iter()
        .zip(traj.time_weights())
        .map(|(frame, w)| w * (local_sq(frame) + local_sq(&half_derivative(frame))))
        .sum();
    Ok(total.sqrt())
}

/// Weak-topology probe `(u, φ)`.
pub fn pairing(u: &ComplexField, phi: &ComplexField) -> Result<Complex64> {
    inner_product(u, phi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderCheck {
    /// `||u||^3_{L^{18/5}} = |||u|^3||_{L^{6/5}}`
    pub lhs: f64,
    /// `||u||_{L^2} ||u||^2_{L^6}`
    pub rhs: f64,
    pub ok: bool,
}

/// Interpolation `||u||_{18/5} <= ||u||_2^{1/3} ||u||_6^{2/3}` cubed. It holds
/// with constant 1 for any positive measure, the discrete one included.
pub fn holder_chain_check(traj: &SpaceTimeField) -> HolderCheck {
    let norm = |p: f64| lp_space_time(traj, p).expect("p >= 1");
    let lhs = norm(18.0 / 5.0).powi(3);
    let rhs = norm(2.0) * norm(6.0).powi(2);
    HolderCheck {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + 1e-10),
    }
}
