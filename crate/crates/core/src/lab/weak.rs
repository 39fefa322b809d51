//! Weak-versus-strong convergence probe on modulated bumps.
//!
//! `u0 + e^{i k_n x} g` tends to `u0` weakly but not strongly as `n` grows.
//! The probe integrates both data and measures how far the solutions are
//! apart against a fixed test function and in norm.

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::field::{l2_norm, ComplexField};
use crate::norms::pairing;
use crate::solver::{integrate, SolverParams};

#[derive(Clone, Debug, PartialEq)]
pub struct WeakContinuityReport {
    pub mode_list: Vec<i64>,
    /// `sup_{recorded t <= T} |(u^n(t) - u(t), φ)|`
    pub pairing_gap: Vec<f64>,
    /// `||u^n(T) - u(T)||`
    pub strong_gap: Vec<f64>,
    /// `||g||`
    pub bump_norm: f64,
}

impl WeakContinuityReport {
    pub fn pairing_strictly_decreasing(&self) -> bool {
        self.pairing_gap.windows(2).all(|w| w[1] < w[0])
    }

    /// `last / first` pairing gap.
    pub fn pairing_decay(&self) -> f64 {
        match (self.pairing_gap.first(), self.pairing_gap.last()) {
            (Some(&a), Some(&b)) if a > 0.0 => b / a,
            _ => 0.0,
        }
    }

    pub fn min_strong_gap(&self) -> f64 {
        self.strong_gap.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Strictly decreasing pairing gap while the norm gap stays above
    /// `strong_fraction * ||g||`.
    pub fn shows_weak_not_strong(&self, strong_fraction: f64) -> bool {
        self.pairing_strictly_decreasing()
            && self.min_strong_gap() >= strong_fraction * self.bump_norm
    }
}

/// `u0 + e^{i k_n x} g`.
pub fn modulated_data(u0: &ComplexField, g: &ComplexField, mode: i64) -> Result<ComplexField> {
    let carrier = ComplexField::plane_wave(g.grid().clone(), Complex64::new(1.0, 0.0), mode);
    u0.add(&carrier.mul(g)?)
}

pub fn weak_continuity_probe(
    u0: &ComplexField,
    g: &ComplexField,
    phi: &ComplexField,
    params: &SolverParams,
    mode_list: &[i64],
) -> Result<WeakContinuityReport> {
    let limit = u0.grid().n_points() / 4;
    if let Some(&mode) = mode_list.iter().find(|m| m.unsigned_abs() as usize >= limit) {
        return Err(NlsError::UnresolvedModulation { mode, limit });
    }
    u0.ensure_same_grid(g)?;
    u0.ensure_same_grid(phi)?;

    let base = integrate(u0, params)?;
    let mut pairing_gap = Vec::with_capacity(mode_list.len());
    let mut strong_gap = Vec::with_capacity(mode_list.len());
    for &mode in mode_list {
        let run = integrate(&modulated_data(u0, g, mode)?, params)?;
        let mut sup = 0.0f64;
        for (a, b) in run.trajectory.frames().iter().zip(base.trajectory.frames()) {
            sup = sup.max(pairing(&a.sub(b)?, phi)?.norm());
        }
        pairing_gap.push(sup);
        strong_gap.push(l2_norm(&run.final_state.sub(&base.final_state)?));
    }
    Ok(WeakContinuityReport {
        mode_list: mode_list.to_vec(),
        pairing_gap,
        strong_gap,
        bump_norm: l2_norm(g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn zero_bump_gives_zero_gaps() {
        let g = Grid::new(64, 20.0).unwrap();
        let u0 = ComplexField::gaussian(g.clone(), 0.5, 10.0, 1.0).unwrap();
        let phi = ComplexField::gaussian(g.clone(), 1.0, 10.0, 1.0).unwrap();
        let p = SolverParams::new(0.1, ComplexField::zeros(g.clone()), 0.01, 0.2).unwrap();
        let r = weak_continuity_probe(&u0, &ComplexField::zeros(g), &phi, &p, &[1, 2, 4]).unwrap();
        assert!(r.pairing_gap.iter().all(|&x| x == 0.0));
        assert!(r.strong_gap.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_unresolved_modes() {
        let g = Grid::new(64, 20.0).unwrap();
        let z = ComplexField::zeros(g.clone());
        let p = SolverParams::free(g, 0.01, 0.1).unwrap();
        let err = weak_continuity_probe(&z, &z, &z, &p, &[4, 16]).unwrap_err();
        assert!(err.to_string().starts_with("unresolved modulation"));
    }

    #[test]
    fn linear_pairing_gap_matches_direct_evaluation() {
        // Tiny amplitudes: the flow is U(t), so the gap is
        // sup_t |(U(t)(e^{ikx} g), φ)| evaluated directly.
        let grid = Grid::new(256, 50.0).unwrap();
        let amp = 1e-5;
        let g = ComplexField::gaussian(grid.clone(), amp, 25.0, 1.0).unwrap();
        let phi = ComplexField::gaussian(grid.clone(), 1.0, 25.0, 1.0).unwrap();
        let u0 = ComplexField::zeros(grid.clone());
        let p = SolverParams::free(grid.clone(), 1e-2, 0.5).unwrap();
        let r = weak_continuity_probe(&u0, &g, &phi, &p, &[2, 4, 8]).unwrap();
        for (i, &mode) in [2i64, 4, 8].iter().enumerate() {
            let bump = modulated_data(&u0, &g, mode).unwrap();
            let direct = (0..=50)
                .map(|j| {
                    let v = crate::spectral::free_propagator(&bump, j as f64 * 1e-2);
                    pairing(&v, &phi).unwrap().norm()
                })
                .fold(0.0, f64::max);
            assert!((r.pairing_gap[i] - direct).abs() <= 1e-9 * direct + 1e-20);
        }
        assert!(r.pairing_strictly_decreasing());
    }
}
