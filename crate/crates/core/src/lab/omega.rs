//! Late-time snapshot sampling inside the absorbing ball.

use crate::error::{NlsError, Result};
use crate::field::{l2_norm, ComplexField, SpaceTimeField};
use crate::lab::envelope::{absorbing_entry, absorbing_radius};
use crate::solver::{integrate, SolverParams};

/// Relative slack on the confinement check `mass <= M_0^2`.
pub const CONFINEMENT_SLACK: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct OmegaLimitSample {
    pub t_star: f64,
    pub m0: f64,
    /// Frames `u(t_star + j * spacing)`.
    pub snapshots: SpaceTimeField,
    /// Symmetric matrix of L2 distances between snapshots.
    pub pairwise_dist: Vec<Vec<f64>>,
    pub diameter: f64,
    /// Absorbing entry time observed before `t_star`; `None` when `f = 0`.
    pub entry_time: Option<f64>,
}

impl OmegaLimitSample {
    pub fn max_snapshot_norm(&self) -> f64 {
        self.snapshots
            .frames()
            .iter()
            .map(l2_norm)
            .fold(0.0, f64::max)
    }
}

/// Integrates to `t_star`, checks that the trajectory has entered the ball of
/// radius `M_0 = 2||f||/γ` by then, and records `n_samples` snapshots
/// `spacing` apart. With `f = 0` the only attractor is `{0}` and the ball
/// checks are skipped.
///
/// `spacing` is split into a whole number of steps no longer than
/// `params.dt`.
pub fn omega_limit_sample(
    u0: &ComplexField,
    params: &SolverParams,
    t_star: f64,
    n_samples: usize,
    spacing: f64,
) -> Result<OmegaLimitSample> {
    if n_samples == 0 {
        return Err(NlsError::InvalidParameter("n_samples must be >= 1".into()));
    }
    if !(spacing > 0.0) || !(t_star >= 0.0) {
        return Err(NlsError::InvalidParameter(format!(
            "need spacing > 0 and t_star >= 0, got {spacing} and {t_star}"
        )));
    }
    let meta = params.meta();
    let forced = meta.forcing_norm > 0.0;
    let m0 = if forced {
        absorbing_radius(meta.gamma, meta.forcing_norm)
    } else {
        0.0
    };

    let (start, entry_time) = if t_star > 0.0 {
        let warmup = params
            .clone()
            .with_t_final(t_star)
            .and_then(|p| {
                let k = p.n_steps() + 1;
                p.with_record_every(k)
            })?;
        let run = integrate(u0, &warmup)?;
        let entry = if forced {
            absorbing_entry(&run.diagnostics, meta.gamma, meta.forcing_norm)?.entry_time
        } else {
            None
        };
        (run.final_state, entry)
    } else {
        let entry = if forced && l2_norm(u0) <= m0 { Some(0.0) } else { None };
        (u0.clone(), entry)
    };
    if forced && !matches!(entry_time, Some(e) if e <= t_star) {
        return Err(NlsError::SamplingBeforeAbsorption {
            t_star,
            entry: entry_time.map_or("never".to_string(), |e| e.to_string()),
        });
    }

    let snapshots = if n_samples == 1 {
        SpaceTimeField::new(spacing, t_star, vec![start])?
    } else {
        let steps_per_sample = ((spacing / params.dt) - 1e-9).ceil().max(1.0) as usize;
        let mut sampler = params.clone();
        sampler.dt = spacing / steps_per_sample as f64;
        sampler.t_final = spacing * (n_samples - 1) as f64;
        sampler.record_every = steps_per_sample;
        let run = integrate(&start, &sampler)?;
        let frames = run.trajectory.frames().to_vec();
        if frames.len() != n_samples {
            return Err(NlsError::InvalidParameter(format!(
                "sampler produced {} frames, expected {n_samples}",
                frames.len()
            )));
        }
        SpaceTimeField::new(spacing, t_star, frames)?
    };

    if forced {
        let bound = m0 * m0 * (1.0 + CONFINEMENT_SLACK);
        if let Some(mass) = snapshots.frames().iter().map(|f| f.mass()).find(|&m| m > bound) {
            return Err(NlsError::OutsideBall { mass, bound });
        }
    }

    let frames = snapshots.frames();
    let n = frames.len();
    let mut pairwise_dist = vec![vec![0.0; n]; n];
    let mut diameter = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = l2_norm(&frames[i].sub(&frames[j])?);
            pairwise_dist[i][j] = d;
            pairwise_dist[j][i] = d;
            diameter = diameter.max(d);
        }
    }

    Ok(OmegaLimitSample {
        t_star,
        m0,
        snapshots,
        pairwise_dist,
        diameter,
        entry_time,
    })
}

/// Smallest L2 distance between a snapshot of `a` and one of `b`.
pub fn cross_min_distance(a: &OmegaLimitSample, b: &OmegaLimitSample) -> Result<f64> {
    let mut best = f64::INFINITY;
    for u in a.snapshots.frames() {
        for v in b.snapshots.frames() {
            best = best.min(l2_norm(&u.sub(v)?));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::rng::{random_smooth_field, Lcg};

    #[test]
    fn unforced_attractor_is_zero() {
        let g = Grid::new(64, 30.0).unwrap();
        let u0 = random_smooth_field(g.clone(), &mut Lcg::new(3), 1.0);
        let p = SolverParams::new(1.0, ComplexField::zeros(g), 0.01, 1.0).unwrap();
        let early = omega_limit_sample(&u0, &p, 1.0, 4, 0.5).unwrap();
        let late = omega_limit_sample(&u0, &p, 10.0, 4, 0.5).unwrap();
        assert_eq!(early.snapshots.len(), 4);
        assert!(late.diameter < early.diameter);
        assert!(late.diameter < 1e-3);
    }

    #[test]
    fn sampling_before_absorption_is_rejected() {
        let g = Grid::new(64, 30.0).unwrap();
        let f = ComplexField::gaussian(g.clone(), 0.05, 15.0, 2.0).unwrap();
        let u0 = ComplexField::gaussian(g, 1.0, 15.0, 2.0).unwrap();
        let p = SolverParams::new(1.0, f, 0.01, 1.0).unwrap();
        let err = omega_limit_sample(&u0, &p, 0.5, 3, 0.5).unwrap_err();
        assert!(err.to_string().starts_with("sampling before absorption"));
    }

    #[test]
    fn distance_matrix_is_symmetric_with_zero_diagonal() {
        let g = Grid::new(64, 30.0).unwrap();
        let f = ComplexField::gaussian(g.clone(), 0.3, 15.0, 2.0).unwrap();
        let p = SolverParams::new(1.0, f, 0.01, 1.0).unwrap();
        let s = omega_limit_sample(&ComplexField::zeros(g), &p, 0.0, 5, 0.3).unwrap();
        for i in 0..5 {
            assert_eq!(s.pairwise_dist[i][i], 0.0);
            for j in 0..5 {
                assert_eq!(s.pairwise_dist[i][j], s.pairwise_dist[j][i]);
            }
        }
        let max = s.pairwise_dist.iter().flatten().cloned().fold(0.0, f64::max);
        assert_eq!(s.diameter, max);
        assert!(s.diameter <= 2.0 * s.m0);
    }
}
