//! Mass decay envelope and absorbing-ball entry, both read off the per-step
//! diagnostics of a run.

use crate::error::{NlsError, Result};
use crate::solver::StepDiagnostics;

/// Outcome of [`decay_envelope_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeCheck {
    /// `max_t [M(t) - bound(t)]`; negative when the envelope holds with slack.
    pub max_violation: f64,
    pub tol: f64,
    pub ok: bool,
}

/// Mass envelope `e^{-γt} M(0) + (1 - e^{-γt}) ||f||^2 / γ^2`.
pub fn envelope_bound(t: f64, gamma: f64, f_norm: f64, u0_norm: f64) -> f64 {
    let decay = (-gamma * t).exp();
    decay * u0_norm * u0_norm - (-gamma * t).exp_m1() * f_norm * f_norm / (gamma * gamma)
}

/// Checks `M(t) <= envelope_bound(t) + tol` at every recorded step.
pub fn decay_envelope_check(
    diagnostics: &[StepDiagnostics],
    gamma: f64,
    f_norm: f64,
    u0_norm: f64,
    tol: f64,
) -> Result<EnvelopeCheck> {
    if !(gamma > 0.0) {
        return Err(NlsError::EnvelopeRequiresDamping);
    }
    let max_violation = diagnostics
        .iter()
        .map(|d| d.mass - envelope_bound(d.t, gamma, f_norm, u0_norm))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EnvelopeCheck {
        max_violation,
        tol,
        ok: max_violation <= tol,
    })
}

/// `M_0 = 2 ||f|| / γ`.
pub fn absorbing_radius(gamma: f64, f_norm: f64) -> f64 {
    2.0 * f_norm / gamma
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbsorbingBallReport {
    pub m0: f64,
    /// First recorded time after which `||u|| <= M_0` for the rest of the
    /// record; `None` reads "never within T".
    pub entry_time: Option<f64>,
    /// Time after which the envelope itself lies inside the ball; 0 when the
    /// data start inside, infinite when `f = 0`.
    pub predicted_bound: f64,
    /// `(t, ||u(t)||)`
    pub mass_series: Vec<(f64, f64)>,
}

impl AbsorbingBallReport {
    /// True when the entry happened no later than `predicted_bound + slack`.
    pub fn entry_within_bound(&self, slack: f64) -> bool {
        match self.entry_time {
            Some(t) => t <= self.predicted_bound + slack,
            None => false,
        }
    }

    /// Whether every recorded norm after `entry_time` stays in the ball.
    pub fn stays_inside_after_entry(&self) -> bool {
        match self.entry_time {
            Some(te) => self
                .mass_series
                .iter()
                .filter(|(t, _)| *t >= te)
                .all(|(_, n)| *n <= self.m0),
            None => false,
        }
    }
}

/// Detects entry into the ball of radius `M_0`. The initial norm is taken
/// from `diagnostics[0]`.
pub fn absorbing_entry(
    diagnostics: &[StepDiagnostics],
    gamma: f64,
    f_norm: f64,
) -> Result<AbsorbingBallReport> {
    if !(gamma > 0.0) {
        return Err(NlsError::EnvelopeRequiresDamping);
    }
    let m0 = absorbing_radius(gamma, f_norm);
    let mass_series: Vec<(f64, f64)> = diagnostics.iter().map(|d| (d.t, d.mass.sqrt())).collect();

    let entry_time = match mass_series.iter().rposition(|&(_, n)| n > m0) {
        None => mass_series.first().map(|&(t, _)| t),
        Some(last_out) => mass_series.get(last_out + 1).map(|&(t, _)| t),
    };

    let u0_norm = mass_series.first().map_or(0.0, |&(_, n)| n);
    let predicted_bound = if u0_norm <= m0 {
        0.0
    } else if f_norm == 0.0 {
        f64::INFINITY
    } else {
        // e^{-γt} ||u0||^2 <= 3 ||f||^2 / γ^2 puts the envelope below M_0^2
        (gamma * gamma * u0_norm * u0_norm / (3.0 * f_norm * f_norm)).ln() / gamma
    };

    Ok(AbsorbingBallReport {
        m0,
        entry_time,
        predicted_bound,
        mass_series,
    })
}
