//! Experiments probing the dissipative dynamics of the damped, forced NLS
//! flow: mass envelope, absorbing ball, half-derivative smoothing, energy
//! identity, weak continuity and late-time sampling.

pub mod ball;
pub mod envelope;
pub mod omega;
pub mod smoothing;
pub mod weak;

pub use ball::{ball_energy_identity, BallIdentityReport};
pub use envelope::{
    absorbing_entry, absorbing_radius, decay_envelope_check, envelope_bound, AbsorbingBallReport,
    EnvelopeCheck,
};
pub use omega::{cross_min_distance, omega_limit_sample, OmegaLimitSample};
pub use smoothing::{
    empirical_kato_constant, fitted_spread, free_trajectory, smoothing_norm, smoothing_ratio,
    SmoothingRow, SmoothingRun,
};
pub use weak::{modulated_data, weak_continuity_probe, WeakContinuityReport};
