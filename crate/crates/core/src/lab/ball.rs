//! Energy identity along a recorded trajectory:
//!
//! `||u(t)||^2 = e^{-2γτ} ||u(t-τ)||^2 + 2 ∫_0^τ e^{-2γs} Re(f, u(t-s)) ds`
//!
//! obtained from `d/dt ||u||^2 = -2γ ||u||^2 + 2 Re(f, u)` by variation of
//! constants. The forcing integral enters with a plus sign.

use crate::error::{NlsError, Result};
use crate::field::{inner_product, ComplexField, SpaceTimeField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallIdentityReport {
    pub tau: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates both sides of the identity on the frames of `traj`; the
/// `s`-integral uses the trapezoid rule on the recorded frames in `[t-τ, t]`.
pub fn ball_energy_identity(
    traj: &SpaceTimeField,
    gamma: f64,
    forcing: &ComplexField,
    t: f64,
    tau: f64,
) -> Result<BallIdentityReport> {
    if !(tau >= 0.0) {
        return Err(NlsError::WindowOutOfRange(format!("tau={tau} must be >= 0")));
    }
    let end = traj.index_at(t).ok_or_else(|| {
        NlsError::WindowOutOfRange(format!("t={t} is not a recorded frame time"))
    })?;
    let start = traj.index_at(t - tau).ok_or_else(|| {
        NlsError::WindowOutOfRange(format!("t-tau={} is not a recorded frame time", t - tau))
    })?;
    forcing.ensure_same_grid(&traj.frames()[0])?;

    let frames = traj.frames();
    let lhs = frames[end].mass();
    let decay = (-2.0 * gamma * tau).exp() * frames[start].mass();

    // s = t - time(i) runs over [0, τ]
    let integrand = |i: usize| -> Result<f64> {
        let s = t - traj.time(i);
        Ok((-2.0 * gamma * s).exp() * inner_product(forcing, &frames[i])?.re)
    };
    let mut integral = 0.0;
    if end > start {
        let h = traj.dt_sample();
        let mut prev = integrand(start)?;
        for i in start + 1..=end {
            let cur = integrand(i)?;
            integral += 0.5 * h * (prev + cur);
            prev = cur;
        }
    }
    let rhs = decay + 2.0 * integral;
    Ok(BallIdentityReport {
        tau,
        t,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}
