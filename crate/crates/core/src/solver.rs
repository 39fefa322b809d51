//! Strang-split integrator for `u_t + γu + i u_xx + i|u|^2 u = f`.
//!
//! The step is `B(h/2) A(h) B(h/2)` where `A` is the linear flow
//! (dispersion, damping, forcing) solved exactly per Fourier mode and `B` is
//! the pointwise phase rotation `u -> u e^{-i|u|^2 h}`. Both sub-flows are
//! exact, so the only error left is the splitting error.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::field::{inner_product, l2_norm, ComplexField, RunMeta, SpaceTimeField};
use crate::grid::Grid;
use crate::spectral::{dealias_two_thirds, forward_dft, inverse_dft, spectral_tail_ratio, Spectrum};

#[derive(Clone, Debug)]
pub struct SolverParams {
    pub gamma: f64,
    pub forcing: ComplexField,
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    /// Apply the 2/3-rule truncation after every step.
    pub dealias: bool,
}

impl SolverParams {
    pub fn new(gamma: f64, forcing: ComplexField, dt: f64, t_final: f64) -> Result<Self> {
        let p = SolverParams {
            gamma,
            forcing,
            dt,
            t_final,
            record_every: 1,
            dealias: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unforced, undamped parameters on `grid`.
    pub fn free(grid: Arc<Grid>, dt: f64, t_final: f64) -> Result<Self> {
        SolverParams::new(0.0, ComplexField::zeros(grid), dt, t_final)
    }

    pub fn with_record_every(mut self, k: usize) -> Result<Self> {
        self.record_every = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn with_t_final(mut self, t_final: f64) -> Result<Self> {
        self.t_final = t_final;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(NlsError::InvalidParameter(msg));
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be finite and >= 0, got {}", self.gamma));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if self.dt > self.t_final {
            return bad(format!("dt={} exceeds t_final={}", self.dt, self.t_final));
        }
        if self.record_every == 0 {
            return bad("record_every must be >= 1".into());
        }
        if !self.forcing.is_finite() {
            return bad("forcing has non-finite entries".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.forcing.grid()
    }

    pub fn meta(&self) -> RunMeta {
        RunMeta {
            gamma: self.gamma,
            forcing_norm: l2_norm(&self.forcing),
        }
    }

    /// Number of steps to reach `t_final`; the last one may be shortened.
    pub fn n_steps(&self) -> usize {
        ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub t: f64,
    /// `||u(t)||^2`
    pub mass: f64,
    /// `|ΔM/h + 2γ M_mid - 2 Re(f, u_mid)|` over the step ending at `t`,
    /// midpoints taken as averages of the two end states.
    pub balance_residual: f64,
    pub linf: f64,
}

/// `(e^{z} - 1)` without cancellation for small `|z|`.
fn expm1_complex(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let half_sin = (0.5 * b).sin();
    Complex64::new(
        a.exp_m1() * b.cos() - 2.0 * half_sin * half_sin,
        a.exp() * b.sin(),
    )
}

/// Per-mode factors of the exact linear flow over a step of length `h`:
/// `û(h) = propagator * û(0) + forcing_term`.
struct LinearFlow {
    propagator: Vec<Complex64>,
    forcing_term: Vec<Complex64>,
}

impl LinearFlow {
    fn new(grid: &Grid, gamma: f64, forcing_hat: &Spectrum, h: f64) -> Self {
        let mut propagator = Vec::with_capacity(grid.n_points());
        let mut forcing_term = Vec::with_capacity(grid.n_points());
        for (&k, &fk) in grid.wavenumbers().iter().zip(forcing_hat.coeffs()) {
            let lambda = Complex64::new(-gamma, k * k);
            let z = lambda * h;
            propagator.push(z.exp());
            // (e^{λh} - 1) / λ, with limit h at λ = 0 (γ = 0, k = 0)
            let phi = if lambda.norm() == 0.0 {
                Complex64::new(h, 0.0)
            } else {
                expm1_complex(z) / lambda
            };
            forcing_term.push(phi * fk);
        }
        LinearFlow {
            propagator,
            forcing_term,
        }
    }

    fn apply(&self, u: &ComplexField) -> ComplexField {
        let mut s = forward_dft(u);
        for ((c, p), f) in s
            .coeffs_mut()
            .iter_mut()
            .zip(&self.propagator)
            .zip(&self.forcing_term)
        {
            *c = *c * p + f;
        }
        inverse_dft(&s)
    }
}

/// Exact flow of `u_t = -i u_xx - γu + f` over time `h`, mode by mode.
pub fn linear_substep(u: &ComplexField, params: &SolverParams, h: f64) -> Result<ComplexField> {
    u.ensure_same_grid(&params.forcing)?;
    let fhat = forward_dft(&params.forcing);
    Ok(LinearFlow::new(u.grid(), params.gamma, &fhat, h).apply(u))
}

/// Exact flow of `u_t = -i|u|^2 u` over time `h`: `u e^{-i|u|^2 h}`.
pub fn nonlinear_substep(u: &ComplexField, h: f64) -> ComplexField {
    let mut out = u.clone();
    for z in out.values_mut() {
        *z *= Complex64::from_polar(1.0, -z.norm_sqr() * h);
    }
    out
}

/// One `B(dt/2) A(dt) B(dt/2)` step with the configured `dt`.
pub fn strang_step(u: &ComplexField, params: &SolverParams) -> Result<ComplexField> {
    u.ensure_same_grid(&params.forcing)?;
    let fhat = forward_dft(&params.forcing);
    let flow = LinearFlow::new(u.grid(), params.gamma, &fhat, params.dt);
    Ok(split_step(u, &flow, params.dt, params.dealias))
}

fn split_step(u: &ComplexField, flow: &LinearFlow, h: f64, dealias: bool) -> ComplexField {
    let half = nonlinear_substep(u, 0.5 * h);
    let out = nonlinear_substep(&flow.apply(&half), 0.5 * h);
    if dealias {
        dealias_two_thirds(&out)
    } else {
        out
    }
}

/// Output of [`integrate`].
#[derive(Clone, Debug)]
pub struct Run {
    /// Frames at steps `0, k, 2k, ..` with `k = record_every`.
    pub trajectory: SpaceTimeField,
    /// One entry per step, plus the initial state at index 0.
    pub diagnostics: Vec<StepDiagnostics>,
    /// State at `t_final`, recorded or not.
    pub final_state: ComplexField,
    /// Worst [`spectral_tail_ratio`] over the recorded frames.
    pub max_tail_ratio: f64,
}

impl Run {
    pub fn final_time(&self) -> f64 {
        self.diagnostics.last().map_or(0.0, |d| d.t)
    }

    pub fn max_balance_residual(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.balance_residual)
            .fold(0.0, f64::max)
    }
}

/// Repeated Strang steps from `t = 0` to `params.t_final`.
pub fn integrate(u0: &ComplexField, params: &SolverParams) -> Result<Run> {
    params.validate()?;
    u0.ensure_same_grid(&params.forcing)?;
    if !u0.is_finite() {
        return Err(NlsError::InvalidParameter("initial data has non-finite entries".into()));
    }
    let grid = u0.grid().clone();
    let gamma = params.gamma;
    let fhat = forward_dft(&params.forcing);
    let flow = LinearFlow::new(&grid, gamma, &fhat, params.dt);
    let n_steps = params.n_steps();
    let remainder = params.t_final - (n_steps - 1) as f64 * params.dt;
    let full_last = (remainder - params.dt).abs() <= 1e-9 * params.dt;
    let last_h = if full_last { params.dt } else { remainder };

    let forcing_pairing = |u: &ComplexField| -> f64 {
        inner_product(&params.forcing, u).map_or(0.0, |z| z.re)
    };

    let mut u = u0.clone();
    let mut mass = u.mass();
    let mut pairing = forcing_pairing(&u);
    let mut diagnostics = Vec::with_capacity(n_steps + 1);
    diagnostics.push(StepDiagnostics {
        t: 0.0,
        mass,
        balance_residual: 0.0,
        linf: u.linf(),
    });
    let mut frames = vec![u.clone()];
    let mut max_tail_ratio = spectral_tail_ratio(&u);

    for step in 1..=n_steps {
        let (h, t) = if step == n_steps {
            (last_h, params.t_final)
        } else {
            (params.dt, step as f64 * params.dt)
        };
        u = if step == n_steps && !full_last {
            let short = LinearFlow::new(&grid, gamma, &fhat, last_h);
            split_step(&u, &short, h, params.dealias)
        } else {
            split_step(&u, &flow, h, params.dealias)
        };
        if !u.is_finite() {
            return Err(NlsError::BlowUp { t, diagnostics });
        }
        let new_mass = u.mass();
        let new_pairing = forcing_pairing(&u);
        let residual = ((new_mass - mass) / h + gamma * (new_mass + mass)
            - (pairing + new_pairing))
            .abs();
        diagnostics.push(StepDiagnostics {
            t,
            mass: new_mass,
            balance_residual: residual,
            linf: u.linf(),
        });
        mass = new_mass;
        pairing = new_pairing;

        if step % params.record_every == 0 && (step < n_steps || full_last) {
            max_tail_ratio = max_tail_ratio.max(spectral_tail_ratio(&u));
            frames.push(u.clone());
        }
    }

    let dt_sample = params.dt * params.record_every as f64;
    let trajectory = SpaceTimeField::new(dt_sample, 0.0, frames)?.with_meta(params.meta());
    Ok(Run {
        trajectory,
        diagnostics,
        final_state: u,
        max_tail_ratio,
    })
}

/// Exact plane-wave solution `A(t) e^{ikx}` of the unforced equation.
pub fn plane_wave_reference(
    a0: Complex64,
    mode: i64,
    grid: Arc<Grid>,
    gamma: f64,
    t: f64,
) -> ComplexField {
    let k = grid.wavenumber_of(mode);
    let m0 = a0.norm_sqr();
    let amplitude = if gamma == 0.0 {
        a0 * Complex64::from_polar(1.0, (k * k - m0) * t)
    } else {
        let nonlinear_phase = m0 * (-(-2.0 * gamma * t).exp_m1()) / (2.0 * gamma);
        a0 * (-gamma * t).exp() * Complex64::from_polar(1.0, k * k * t - nonlinear_phase)
    };
    ComplexField::plane_wave(grid, amplitude, mode)
}

/// Largest defect of the Duhamel formula
/// `u(t) = U(t)u0 - i ∫_0^t U(t-s) |u|^2 u(s) ds` over the recorded frames,
/// the integral taken by the trapezoid rule on the frames. `u0` is the state
/// at `traj.t0()`.
pub fn duhamel_residual(traj: &SpaceTimeField, u0: &ComplexField) -> Result<f64> {
    if let Some(meta) = traj.meta() {
        if meta.gamma != 0.0 || meta.forcing_norm != 0.0 {
            return Err(NlsError::WrongRegime {
                gamma: meta.gamma,
                forcing_norm: meta.forcing_norm,
            });
        }
    }
    u0.ensure_same_grid(&traj.frames()[0])?;
    let grid = traj.grid().clone();
    let k2: Vec<f64> = grid.wavenumbers().iter().map(|k| k * k).collect();
    let u0_hat = forward_dft(u0);

    // Ŵ(s) = e^{-ik^2 s} F[|u|^2 u](s), so U(t-s)N = U(t) U(-s) N
    let pulled_back = |i: usize| -> Vec<Complex64> {
        let s = traj.time(i) - traj.t0();
        let frame = &traj.frames()[i];
        let cubic: Vec<Complex64> = frame.values().iter().map(|z| z * z.norm_sqr()).collect();
        let mut w = forward_dft(&ComplexField::from_raw(grid.clone(), cubic));
        for (c, &kk) in w.coeffs_mut().iter_mut().zip(&k2) {
            *c *= Complex64::from_polar(1.0, -kk * s);
        }
        w.coeffs().to_vec()
    };

    let n = grid.n_points();
    let half_dt = 0.5 * traj.dt_sample();
    let mut integral = vec![Complex64::new(0.0, 0.0); n];
    let mut prev = pulled_back(0);
    let mut worst = 0.0f64;
    for i in 0..traj.len() {
        if i > 0 {
            let cur = pulled_back(i);
            for ((acc, a), b) in integral.iter_mut().zip(&prev).zip(&cur) {
                *acc += (a + b) * half_dt;
            }
            prev = cur;
        }
        let t = traj.time(i) - traj.t0();
        let u_hat = forward_dft(&traj.frames()[i]);
        let defect: Vec<Complex64> = (0..n)
            .map(|m| {
                let duhamel = Complex64::from_polar(1.0, k2[m] * t)
                    * (u0_hat.coeffs()[m] - Complex64::i() * integral[m]);
                u_hat.coeffs()[m] - duhamel
            })
            .collect();
        worst = worst.max(Spectrum::new(grid.clone(), defect).l2_norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_smooth_field, Lcg};
    use crate::spectral::free_propagator;
    use std::f64::consts::PI;

    fn rel_err(a: &ComplexField, b: &ComplexField) -> f64 {
        l2_norm(&a.sub(b).unwrap()) / l2_norm(b)
    }

    fn grid() -> Arc<Grid> {
        Grid::new(128, 40.0).unwrap()
    }

    #[test]
    fn linear_substep_reduces_to_free_group() {
        let g = grid();
        let u = random_smooth_field(g.clone(), &mut Lcg::new(1), 1.0);
        let p = SolverParams::free(g, 0.1, 1.0).unwrap();
        let a = linear_substep(&u, &p, 0.3).unwrap();
        assert!(rel_err(&a, &free_propagator(&u, 0.3)) < 1e-12);
    }

    #[test]
    fn linear_substep_dc_mode_matches_scalar_ode() {
        let g = grid();
        let c = 0.7;
        let gamma = 1.3;
        let h = 0.45;
        let f = ComplexField::from_fn(g.clone(), |_| Complex64::new(c, 0.0)).unwrap();
        let p = SolverParams::new(gamma, f, 0.1, 1.0).unwrap();
        let out = linear_substep(&ComplexField::zeros(g), &p, h).unwrap();
        let dc = forward_dft(&out).coeffs()[0];
        // u' = -γu + c, u(0) = 0, integrated by RK4 with 10^4 steps
        let rhs = |y: f64| -gamma * y + c;
        let n = 10_000;
        let dh = h / n as f64;
        let mut y = 0.0;
        for _ in 0..n {
            let k1 = rhs(y);
            let k2 = rhs(y + 0.5 * dh * k1);
            let k3 = rhs(y + 0.5 * dh * k2);
            let k4 = rhs(y + dh * k3);
            y += dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((dc.re - y).abs() < 1e-13, "{} vs {}", dc.re, y);
        assert!(dc.im.abs() < 1e-14);
    }

    #[test]
    fn linear_substep_zero_damping_dc_limit() {
        let g = grid();
        let f = ComplexField::from_fn(g.clone(), |_| Complex64::new(2.0, -1.0)).unwrap();
        let p = SolverParams::new(0.0, f, 0.1, 1.0).unwrap();
        let out = linear_substep(&ComplexField::zeros(g), &p, 0.25).unwrap();
        let dc = forward_dft(&out).coeffs()[0];
        assert!((dc - Complex64::new(0.5, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn strong_damping_relaxes_to_stationary_state() {
        let g = grid();
        let gamma = 1e3;
        let f = ComplexField::gaussian(g.clone(), 1.0, 20.0, 2.0).unwrap();
        let u0 = random_smooth_field(g.clone(), &mut Lcg::new(2), 1.0);
        let p = SolverParams::new(gamma, f.clone(), 0.1, 1.0).unwrap();
        let out = forward_dft(&linear_substep(&u0, &p, 1.0).unwrap());
        let fhat = forward_dft(&f);
        for (slot, &k) in g.wavenumbers().iter().enumerate() {
            let stationary = fhat.coeffs()[slot] / Complex64::new(gamma, -k * k);
            assert!((out.coeffs()[slot] - stationary).norm() < 1e-10);
        }
    }

    #[test]
    fn nonlinear_substep_cases() {
        let g = grid();
        assert!(nonlinear_substep(&ComplexField::zeros(g.clone()), 0.3).linf() == 0.0);

        let unit = ComplexField::from_fn(g.clone(), |x| Complex64::from_polar(1.0, x)).unwrap();
        assert!(rel_err(&nonlinear_substep(&unit, 2.0 * PI), &unit) < 1e-13);

        let u = random_smooth_field(g, &mut Lcg::new(3), 2.0);
        let v = nonlinear_substep(&u, 0.77);
        assert!((l2_norm(&v) - l2_norm(&u)).abs() < 1e-13);
    }

    #[test]
    fn unforced_step_does_not_gain_mass() {
        let g = grid();
        let u = random_smooth_field(g.clone(), &mut Lcg::new(4), 1.0);
        let p = SolverParams::new(50.0, ComplexField::zeros(g), 0.01, 1.0).unwrap();
        let v = strang_step(&u, &p).unwrap();
        assert!(v.mass() <= u.mass());
    }

    #[test]
    fn plane_wave_step_error_is_third_order() {
        let g = Grid::new(64, 2.0 * PI * 8.0).unwrap();
        let a0 = Complex64::new(1.0, 0.0);
        let gamma = 0.5;
        let err = |dt: f64| {
            let u0 = plane_wave_reference(a0, 1, g.clone(), gamma, 0.0);
            let p = SolverParams::new(gamma, ComplexField::zeros(g.clone()), dt, 1.0).unwrap();
            let u1 = strang_step(&u0, &p).unwrap();
            l2_norm(&u1.sub(&plane_wave_reference(a0, 1, g.clone(), gamma, dt)).unwrap())
        };
        let ratio = err(0.02) / err(0.01);
        assert!((6.5..9.5).contains(&ratio), "local ratio {ratio}");
    }

    #[test]
    fn integrate_zero_data_stays_zero() {
        let g = grid();
        let p = SolverParams::free(g.clone(), 0.01, 0.5).unwrap();
        let run = integrate(&ComplexField::zeros(g), &p).unwrap();
        assert_eq!(run.diagnostics.len(), 51);
        for d in &run.diagnostics {
            assert_eq!((d.mass, d.balance_residual, d.linf), (0.0, 0.0, 0.0));
        }
        assert!(run.trajectory.frames().iter().all(|f| f.linf() == 0.0));
    }

    #[test]
    fn integrate_reaches_t_final_with_partial_step() {
        let g = grid();
        let u0 = random_smooth_field(g.clone(), &mut Lcg::new(5), 1.0);
        let p = SolverParams::free(g, 0.03, 0.1).unwrap();
        let run = integrate(&u0, &p).unwrap();
        assert_eq!(run.diagnostics.len(), 5);
        assert_eq!(run.final_time(), 0.1);
        // 0.1 is off the 0.03 lattice, so only steps 0..=3 are frames
        assert_eq!(run.trajectory.len(), 4);
    }

    #[test]
    fn undamped_mass_is_conserved() {
        let g = grid();
        let u0 = random_smooth_field(g.clone(), &mut Lcg::new(6), 1.5);
        let p = SolverParams::free(g, 1e-2, 10.0).unwrap();
        let run = integrate(&u0, &p).unwrap();
        let m0 = run.diagnostics[0].mass;
        for d in &run.diagnostics {
            assert!((d.mass / m0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn damped_unforced_mass_decays_exactly() {
        let g = grid();
        let u0 = random_smooth_field(g.clone(), &mut Lcg::new(8), 1.0);
        let p = SolverParams::new(1.0, ComplexField::zeros(g), 1e-2, 5.0).unwrap();
        let run = integrate(&u0, &p).unwrap();
        let m0 = run.diagnostics[0].mass;
        for d in &run.diagnostics {
            assert!((d.mass * (2.0 * d.t).exp() / m0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let g = grid();
        let mut values = vec![Complex64::new(0.0, 0.0); g.n_points()];
        values[0] = Complex64::new(1e200, 0.0);
        let u0 = ComplexField::new(g.clone(), values).unwrap();
        let p = SolverParams::free(g, 0.1, 1.0).unwrap();
        match integrate(&u0, &p) {
            Err(NlsError::BlowUp { t, diagnostics }) => {
                assert!(t > 0.0);
                assert!(!diagnostics.is_empty());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn plane_wave_reference_cases() {
        let g = Grid::new(64, 2.0 * PI * 8.0).unwrap();
        let k = g.wavenumber_of(1);
        let a0 = Complex64::from_polar(k, 0.4);
        let still = plane_wave_reference(a0, 1, g.clone(), 0.0, 3.0);
        assert!(rel_err(&still, &plane_wave_reference(a0, 1, g.clone(), 0.0, 0.0)) < 1e-14);

        let late = plane_wave_reference(Complex64::new(1.0, 0.0), 1, g, 1.0, 50.0);
        assert!(late.linf() < 1e-20);
    }

    #[test]
    fn duhamel_rejects_damped_runs() {
        let g = grid();
        let u0 = random_smooth_field(g.clone(), &mut Lcg::new(9), 0.5);
        let p = SolverParams::new(0.5, ComplexField::zeros(g), 0.01, 0.1).unwrap();
        let run = integrate(&u0, &p).unwrap();
        assert!(matches!(
            duhamel_residual(&run.trajectory, &u0),
            Err(NlsError::WrongRegime { .. })
        ));
    }

    #[test]
    fn duhamel_zero_and_linear_limits() {
        let g = grid();
        let p = SolverParams::free(g.clone(), 0.01, 0.5).unwrap();
        let zero = ComplexField::zeros(g.clone());
        let run = integrate(&zero, &p).unwrap();
        assert_eq!(duhamel_residual(&run.trajectory, &zero).unwrap(), 0.0);

        let tiny = random_smooth_field(g, &mut Lcg::new(10), 1e-6);
        let run = integrate(&tiny, &p).unwrap();
        assert!(duhamel_residual(&run.trajectory, &tiny).unwrap() <= 1e-14 + 1e-18);
    }

    #[test]
    fn long_runs_keep_the_final_frame() {
        let g = Grid::new(8, 1.0).unwrap();
        let p = SolverParams::free(g.clone(), 1.0 / 1000.0, 19.0)
            .unwrap()
            .with_record_every(1000)
            .unwrap();
        let run = integrate(&ComplexField::zeros(g), &p).unwrap();
        assert_eq!(run.trajectory.len(), 20);
        assert_eq!(run.final_time(), 19.0);
    }
}
