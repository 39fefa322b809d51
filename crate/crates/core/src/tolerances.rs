//! Pinned thresholds shared by the CLI checks and the test suites.

/// Accepted band for the error ratio under a halving of the step
/// (second-order methods give 4).
pub const HALVING_RATIO_BAND: (f64, f64) = (3.3, 4.7);

/// Constant in the envelope tolerance `tol(dt) = ENVELOPE_C_TOL * dt^2`.
///
/// Ten times the largest balance-defect constant `max_step residual / dt^2`
/// measured on the balance ladder (γ = 1, Gaussian forcing, random data,
/// dt = 1e-3).
pub const ENVELOPE_C_TOL: f64 = 10.0 * MEASURED_BALANCE_CONSTANT;

/// `max residual / dt^2` on the balance ladder (largest observed 1.2249,
/// seeds 0..3, T = 5), rounded up.
pub const MEASURED_BALANCE_CONSTANT: f64 = 1.23;

/// `|mass(t) e^{2γt} / mass(0) - 1|` bound for unforced runs.
pub const MASS_LAW_TOL: f64 = 1e-9;

/// Relative slack on the interpolation inequality.
pub const HOLDER_SLACK: f64 = 1e-10;

/// Largest accepted `max/min` spread of fitted smoothing constants.
pub const SMOOTHING_SPREAD_MAX: f64 = 3.0;

/// Weak-continuity dichotomy: last/first pairing gap and the floor on the
/// norm gap as a fraction of `||g||`.
pub const WEAK_PAIRING_DECAY_MAX: f64 = 0.05;
pub const WEAK_STRONG_FLOOR: f64 = 0.5;

pub fn in_halving_band(ratio: f64) -> bool {
    (HALVING_RATIO_BAND.0..=HALVING_RATIO_BAND.1).contains(&ratio)
}
