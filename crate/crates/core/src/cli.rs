//! `nlsa` command-line front end.
//!
//! Exit codes: 0 when the run succeeded and every checked invariant held,
//! 1 when an invariant failed or the experiment itself errored, 2 on usage
//! or configuration errors.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use num_complex::Complex64;

use crate::error::NlsError;
use crate::field::{l2_norm, ComplexField};
use crate::grid::Grid;
use crate::io::config::{
    parse_config, ExperimentConfig, FieldSpec, Subcommand, STREAM_BUMP, STREAM_FORCING,
    STREAM_INITIAL, STREAM_TEST_FUNCTION,
};
use crate::io::report::{emit_csv, fmt_float, ConvergenceRow, MassSeries, Table};
use crate::io::snapshot::write_snapshot;
use crate::lab::{self, SmoothingRun};
use crate::norms::{self, NormReport};
use crate::solver::{integrate, plane_wave_reference, SolverParams};
use crate::spectral::half_derivative;
use crate::tolerances::{in_halving_band, ENVELOPE_C_TOL, WEAK_STRONG_FLOOR};

/// Spectral tail level above which runs print an under-resolution warning.
const TAIL_WARNING: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "nlsa", version, about = "Damped, forced cubic NLS laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Experiment configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long, env = "NLSA_OUTPUT_DIR")]
    output: Option<PathBuf>,
}

#[derive(ClapSubcommand, Debug)]
enum Command {
    /// Integrate and store the mass series and final state.
    Simulate(CommonArgs),
    /// Step-halving ladder against the exact plane wave.
    Convergence(CommonArgs),
    /// Check the mass decay envelope.
    Decay(CommonArgs),
    /// Detect entry into the absorbing ball.
    Absorb(CommonArgs),
    /// Fit the half-derivative smoothing constant over amplitude scales.
    Smoothing(CommonArgs),
    /// Evaluate the energy identity on a window `[t - tau, t]`.
    BallIdentity(CommonArgs),
    /// Weak-versus-strong gaps for modulated bumps.
    WeakContinuity(CommonArgs),
    /// Late-time snapshots inside the absorbing ball.
    OmegaLimit(CommonArgs),
    /// Space-time norms and the interpolation inequality.
    Norms(CommonArgs),
}

impl Command {
    fn split(self) -> (Subcommand, CommonArgs) {
        match self {
            Command::Simulate(a) => (Subcommand::Simulate, a),
            Command::Convergence(a) => (Subcommand::Convergence, a),
            Command::Decay(a) => (Subcommand::Decay, a),
            Command::Absorb(a) => (Subcommand::Absorb, a),
            Command::Smoothing(a) => (Subcommand::Smoothing, a),
            Command::BallIdentity(a) => (Subcommand::BallIdentity, a),
            Command::WeakContinuity(a) => (Subcommand::WeakContinuity, a),
            Command::OmegaLimit(a) => (Subcommand::OmegaLimit, a),
            Command::Norms(a) => (Subcommand::Norms, a),
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<NlsError> for CliError {
    fn from(e: NlsError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first) and runs one experiment.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (sub, common) = cli.command.split();
    match execute(sub, &common) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(CliError::Usage(msg)) => {
            eprintln!("nlsa {sub}: {msg}");
            2
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("nlsa {sub}: {msg}");
            1
        }
    }
}

fn execute(sub: Subcommand, common: &CommonArgs) -> CliResult<bool> {
    let cfg = parse_config(&common.config, sub).map_err(usage)?;
    let out_dir = common
        .output
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| usage(format!("cannot create {}: {e}", out_dir.display())))?;
    let setup = Setup::new(&cfg)?;
    match sub {
        Subcommand::Simulate => simulate(&cfg, &setup, &out_dir),
        Subcommand::Convergence => convergence(&cfg, &setup, &out_dir),
        Subcommand::Decay => decay(&cfg, &setup, &out_dir),
        Subcommand::Absorb => absorb(&cfg, &setup, &out_dir),
        Subcommand::Smoothing => smoothing(&cfg, &setup, &out_dir),
        Subcommand::BallIdentity => ball_identity(&cfg, &setup, &out_dir),
        Subcommand::WeakContinuity => weak_continuity(&cfg, &setup, &out_dir),
        Subcommand::OmegaLimit => omega_limit(&cfg, &setup, &out_dir),
        Subcommand::Norms => norms_report(&cfg, &setup, &out_dir),
    }
}

/// Grid, data and solver parameters shared by every experiment.
struct Setup {
    grid: Arc<Grid>,
    u0: ComplexField,
    params: SolverParams,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> CliResult<Self> {
        let grid = cfg.grid().map_err(usage)?;
        let u0 = build_field(&cfg.initial, &grid, cfg.seed, STREAM_INITIAL)?;
        let forcing = build_field(&cfg.forcing, &grid, cfg.seed, STREAM_FORCING)?;
        let params = SolverParams::new(cfg.gamma, forcing, cfg.dt, cfg.t_final)
            .and_then(|p| p.with_record_every(cfg.record_every))
            .map_err(usage)?
            .with_dealias(cfg.dealias);
        Ok(Setup { grid, u0, params })
    }
}

fn build_field(spec: &FieldSpec, grid: &Arc<Grid>, seed: u64, stream: u64) -> CliResult<ComplexField> {
    spec.build(grid, seed.wrapping_add(stream)).map_err(usage)
}

fn write_csv(table: &dyn Table, dir: &Path, name: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    emit_csv(table, &path)?;
    Ok(path)
}

fn summary(sub: Subcommand, fields: &[(&str, String)]) {
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("{sub}: {}", body.join(" "));
}

fn warn_tail(ratio: f64) {
    if ratio > TAIL_WARNING {
        eprintln!(
            "warning: spectral tail ratio {} exceeds {TAIL_WARNING:e}; run may be under-resolved",
            fmt_float(ratio)
        );
    }
}

fn simulate(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let run = integrate(&s.u0, &s.params)?;
    write_csv(&MassSeries(&run.diagnostics), out, "simulate_mass.csv")?;
    write_snapshot(&run.final_state, run.final_time(), &out.join("final.nlsa"))?;
    warn_tail(run.max_tail_ratio);
    summary(
        cfg.subcommand,
        &[
            ("length", fmt_float(s.grid.length())),
            ("n_points", s.grid.n_points().to_string()),
            ("t_final", fmt_float(run.final_time())),
            ("mass0", fmt_float(run.diagnostics[0].mass)),
            ("mass_final", fmt_float(run.diagnostics.last().map_or(0.0, |d| d.mass))),
            ("max_balance_residual", fmt_float(run.max_balance_residual())),
            ("max_tail_ratio", fmt_float(run.max_tail_ratio)),
        ],
    );
    Ok(true)
}

/// Plane-wave error and balance residual on a step-halving ladder.
pub fn convergence_ladder(
    amplitude: Complex64,
    mode: i64,
    params: &SolverParams,
    rungs: usize,
) -> crate::Result<Vec<ConvergenceRow>> {
    let grid = params.grid().clone();
    let reference = plane_wave_reference(amplitude, mode, grid.clone(), params.gamma, params.t_final);
    let u0 = plane_wave_reference(amplitude, mode, grid, params.gamma, 0.0);
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(rungs);
    for r in 0..rungs {
        let mut p = params.clone();
        p.dt = params.dt / (1u64 << r) as f64;
        let n = p.n_steps();
        p.record_every = n + 1;
        let run = integrate(&u0, &p)?;
        let error = l2_norm(&run.final_state.sub(&reference)?);
        let balance = run.max_balance_residual();
        let (ratio, balance_ratio) = match rows.last() {
            Some(prev) => (prev.error / error, prev.balance_residual / balance),
            None => (f64::NAN, f64::NAN),
        };
        rows.push(ConvergenceRow {
            dt: p.dt,
            error,
            ratio,
            balance_residual: balance,
            balance_ratio,
        });
    }
    Ok(rows)
}

fn convergence(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let FieldSpec::PlaneWave { amp, mode } = cfg.initial else {
        return Err(usage("convergence needs `initial = plane:amp,mode`"));
    };
    if cfg.forcing != FieldSpec::Zero {
        return Err(usage("convergence needs `forcing = zero`"));
    }
    let rungs = cfg.refinements.unwrap_or(3);
    if rungs < 2 {
        return Err(usage("refinements must be >= 2"));
    }
    let rows = convergence_ladder(Complex64::new(amp, 0.0), mode, &s.params, rungs)?;
    write_csv(&rows, out, "convergence.csv")?;
    println!("{:>24} {:>24} {:>24}", "dt", "error", "ratio");
    for r in &rows {
        println!("{:>24} {:>24} {:>24}", fmt_float(r.dt), fmt_float(r.error), fmt_float(r.ratio));
    }
    let ok = rows.iter().skip(1).all(|r| in_halving_band(r.ratio));
    summary(
        cfg.subcommand,
        &[
            ("finest_error", fmt_float(rows.last().map_or(0.0, |r| r.error))),
            ("ok", ok.to_string()),
        ],
    );
    Ok(ok)
}

fn decay(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let run = integrate(&s.u0, &s.params)?;
    let c_tol = cfg.c_tol.unwrap_or(ENVELOPE_C_TOL);
    let tol = c_tol * cfg.dt * cfg.dt;
    let f_norm = l2_norm(&s.params.forcing);
    let check = lab::decay_envelope_check(&run.diagnostics, cfg.gamma, f_norm, l2_norm(&s.u0), tol)?;
    write_csv(&MassSeries(&run.diagnostics), out, "decay_mass.csv")?;
    warn_tail(run.max_tail_ratio);
    summary(
        cfg.subcommand,
        &[
            ("max_violation", fmt_float(check.max_violation)),
            ("tol", fmt_float(check.tol)),
            ("ok", check.ok.to_string()),
        ],
    );
    Ok(check.ok)
}

fn absorb(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let run = integrate(&s.u0, &s.params)?;
    let f_norm = l2_norm(&s.params.forcing);
    let report = lab::absorbing_entry(&run.diagnostics, cfg.gamma, f_norm)?;
    write_csv(&report, out, "absorb.csv")?;
    warn_tail(run.max_tail_ratio);
    let horizon = run.final_time();
    let ok = if f_norm == 0.0 {
        true
    } else if report.predicted_bound + cfg.dt <= horizon {
        report.entry_within_bound(cfg.dt) && report.stays_inside_after_entry()
    } else {
        // horizon too short to expect entry
        report.entry_time.is_none() || report.stays_inside_after_entry()
    };
    summary(
        cfg.subcommand,
        &[
            ("m0", fmt_float(report.m0)),
            (
                "entry_time",
                report
                    .entry_time
                    .map_or("never within T".to_string(), fmt_float),
            ),
            ("predicted_bound", fmt_float(report.predicted_bound)),
            ("ok", ok.to_string()),
        ],
    );
    Ok(ok)
}

fn smoothing(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    if cfg.gamma != 0.0 || cfg.forcing != FieldSpec::Zero {
        return Err(usage("smoothing runs with gamma = 0 and forcing = zero"));
    }
    let scales = cfg.scale_list.clone().unwrap_or_default();
    let run = SmoothingRun {
        t_final: cfg.t_final,
        dt: cfg.dt,
        record_every: cfg.record_every,
    };
    let rows = lab::smoothing_ratio(&s.u0, run, &scales)?;
    write_csv(&rows, out, "smoothing.csv")?;
    let kato = lab::empirical_kato_constant(&s.u0, cfg.t_final, cfg.dt * cfg.record_every as f64)?;
    let mut fields = vec![
        ("kato_constant", fmt_float(kato)),
        ("spread", fmt_float(lab::fitted_spread(&rows))),
    ];
    fields.extend(rows.iter().map(|r| ("fitted_c", fmt_float(r.fitted_c))));
    summary(cfg.subcommand, &fields);
    Ok(true)
}

fn ball_identity(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let run = integrate(&s.u0, &s.params)?;
    let t = cfg.t_eval.unwrap_or(cfg.t_final);
    let tau = cfg.tau.unwrap_or(0.0);
    let report = lab::ball_energy_identity(&run.trajectory, cfg.gamma, &s.params.forcing, t, tau)
        .map_err(usage)?;
    write_csv(&report, out, "ball_identity.csv")?;
    summary(
        cfg.subcommand,
        &[
            ("t", fmt_float(report.t)),
            ("tau", fmt_float(report.tau)),
            ("lhs", fmt_float(report.lhs)),
            ("rhs", fmt_float(report.rhs)),
            ("residual", fmt_float(report.residual)),
        ],
    );
    Ok(true)
}

fn weak_continuity(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let bump = build_field(cfg.bump.as_ref().expect("validated"), &s.grid, cfg.seed, STREAM_BUMP)?;
    let phi = build_field(
        cfg.test_function.as_ref().expect("validated"),
        &s.grid,
        cfg.seed,
        STREAM_TEST_FUNCTION,
    )?;
    let modes = cfg.mode_list.clone().unwrap_or_default();
    let report = lab::weak_continuity_probe(&s.u0, &bump, &phi, &s.params, &modes)
        .map_err(|e| match e {
            NlsError::UnresolvedModulation { .. } => usage(e),
            other => other.into(),
        })?;
    write_csv(&report, out, "weak_continuity.csv")?;
    let ok = report.shows_weak_not_strong(WEAK_STRONG_FLOOR);
    let mut fields = vec![("bump_norm", fmt_float(report.bump_norm))];
    for ((m, p), st) in report.mode_list.iter().zip(&report.pairing_gap).zip(&report.strong_gap) {
        fields.push(("mode", m.to_string()));
        fields.push(("pairing_gap", fmt_float(*p)));
        fields.push(("strong_gap", fmt_float(*st)));
    }
    fields.push(("ok", ok.to_string()));
    summary(cfg.subcommand, &fields);
    Ok(ok)
}

fn omega_limit(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let t_star = cfg.t_star.expect("validated");
    let n = cfg.n_samples.expect("validated");
    let spacing = cfg.spacing.expect("validated");
    let sample = lab::omega_limit_sample(&s.u0, &s.params, t_star, n, spacing)?;
    write_csv(&sample, out, "omega_limit.csv")?;
    for (j, frame) in sample.snapshots.frames().iter().enumerate() {
        write_snapshot(frame, sample.snapshots.time(j), &out.join(format!("omega_{j:03}.nlsa")))?;
    }
    summary(
        cfg.subcommand,
        &[
            ("m0", fmt_float(sample.m0)),
            (
                "entry_time",
                sample.entry_time.map_or("none".to_string(), fmt_float),
            ),
            ("diameter", fmt_float(sample.diameter)),
            ("max_norm", fmt_float(sample.max_snapshot_norm())),
        ],
    );
    Ok(true)
}

fn norms_report(cfg: &ExperimentConfig, s: &Setup, out: &Path) -> CliResult<bool> {
    let run = integrate(&s.u0, &s.params)?;
    let traj = &run.trajectory;
    let k = cfg.k_interval.expect("validated");
    let holder = norms::holder_chain_check(traj);
    let smoothed = traj.map_frames(half_derivative);
    let reports = vec![
        NormReport::new("L2_tx", norms::lp_space_time(traj, 2.0)?, traj),
        NormReport::new("L6_tx", norms::lp_space_time(traj, 6.0)?, traj),
        NormReport::new("L18/5_tx", norms::lp_space_time(traj, 18.0 / 5.0)?, traj),
        NormReport::new("Linf_x_L2_t", norms::mixed_linf_x_l2_t(traj), traj),
        NormReport::new("Linf_x_L2_t_half_derivative", norms::mixed_linf_x_l2_t(&smoothed), traj),
        NormReport::new("L2_t_Linf_x", norms::sup_inside_l2_t(traj), traj),
        NormReport::new("L2_t_H1/2_K", norms::local_h_half_l2t(traj, k).map_err(usage)?, traj),
        NormReport::new("holder_lhs", holder.lhs, traj),
        NormReport::new("holder_rhs", holder.rhs, traj),
    ];
    write_csv(&reports, out, "norms.csv")?;
    let mut fields: Vec<(&str, String)> = reports
        .iter()
        .map(|r| (r.name.as_str(), fmt_float(r.value)))
        .collect();
    fields.push(("ok", holder.ok.to_string()));
    summary(cfg.subcommand, &fields);
    Ok(holder.ok)
}
