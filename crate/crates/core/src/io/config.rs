//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key may appear once.
//! Field-valued keys (`forcing`, `initial`, `bump`, `test_function`) take one
//! of
//!
//! - `zero`
//! - `gaussian:amp,center,width` for `amp * exp(-(x - center)^2 / (2 width^2))`
//! - `plane:amp,mode` for `amp * e^{i k_mode x}`
//! - `random:norm` for a seeded random smooth field of the given L2 norm
//! - `file:<path>` for a snapshot, relative paths resolved against the
//!   config file's directory

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::ComplexField;
use crate::grid::Grid;
use crate::io::snapshot::read_snapshot;
use crate::rng::{random_smooth_field, Lcg};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {msg}")]
    Read { path: PathBuf, msg: String },
    #[error("malformed line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("unknown key {key} at line {line}")]
    UnknownKey { key: String, line: usize },
    #[error("duplicate key {key} at line {line}")]
    DuplicateKey { key: String, line: usize },
    #[error("missing key {0}")]
    MissingKey(String),
    #[error("invalid value for {key} at line {line}: {msg}")]
    BadValue { key: String, line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Simulate,
    Convergence,
    Decay,
    Absorb,
    Smoothing,
    BallIdentity,
    WeakContinuity,
    OmegaLimit,
    Norms,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::Convergence => "convergence",
            Subcommand::Decay => "decay",
            Subcommand::Absorb => "absorb",
            Subcommand::Smoothing => "smoothing",
            Subcommand::BallIdentity => "ball-identity",
            Subcommand::WeakContinuity => "weak-continuity",
            Subcommand::OmegaLimit => "omega-limit",
            Subcommand::Norms => "norms",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    Zero,
    Gaussian { amp: f64, center: f64, width: f64 },
    PlaneWave { amp: f64, mode: i64 },
    Random { norm: f64 },
    File(PathBuf),
}

impl FieldSpec {
    fn parse(raw: &str, base_dir: &Path) -> Result<Self, String> {
        let (kind, args) = match raw.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (raw.trim(), ""),
        };
        let nums = |n: usize| -> Result<Vec<f64>, String> {
            let v: Vec<f64> = args
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number")))
                .collect::<Result<_, _>>()?;
            if v.len() != n {
                return Err(format!("{kind} takes {n} numbers, got {}", v.len()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err("non-finite number".into());
            }
            Ok(v)
        };
        match kind {
            "zero" if args.is_empty() => Ok(FieldSpec::Zero),
            "gaussian" => {
                let v = nums(3)?;
                if v[2] <= 0.0 {
                    return Err("gaussian width must be positive".into());
                }
                Ok(FieldSpec::Gaussian {
                    amp: v[0],
                    center: v[1],
                    width: v[2],
                })
            }
            "plane" => {
                let v = nums(2)?;
                if v[1].fract() != 0.0 {
                    return Err("plane-wave mode must be an integer".into());
                }
                Ok(FieldSpec::PlaneWave {
                    amp: v[0],
                    mode: v[1] as i64,
                })
            }
            "random" => {
                let v = nums(1)?;
                if v[0] < 0.0 {
                    return Err("random norm must be >= 0".into());
                }
                Ok(FieldSpec::Random { norm: v[0] })
            }
            "file" if !args.is_empty() => Ok(FieldSpec::File(base_dir.join(args))),
            _ => Err(format!("unrecognized field spec `{raw}`")),
        }
    }

    /// Materializes the field; `stream` seeds the generator for `random:`.
    pub fn build(&self, grid: &Arc<Grid>, stream: u64) -> crate::Result<ComplexField> {
        match self {
            FieldSpec::Zero => Ok(ComplexField::zeros(grid.clone())),
            FieldSpec::Gaussian { amp, center, width } => {
                ComplexField::gaussian(grid.clone(), *amp, *center, *width)
            }
            FieldSpec::PlaneWave { amp, mode } => Ok(ComplexField::plane_wave(
                grid.clone(),
                Complex64::new(*amp, 0.0),
                *mode,
            )),
            FieldSpec::Random { norm } => {
                Ok(random_smooth_field(grid.clone(), &mut Lcg::new(stream), *norm))
            }
            FieldSpec::File(path) => {
                let (field, _) = read_snapshot(path)?;
                if !field.grid().same_as(grid) {
                    return Err(crate::NlsError::IncompatibleGrids);
                }
                Ok(ComplexField::new(grid.clone(), field.into_values())?)
            }
        }
    }
}

/// Seed offsets for the random field streams, added to `seed`.
pub const STREAM_INITIAL: u64 = 0;
pub const STREAM_FORCING: u64 = 1;
pub const STREAM_BUMP: u64 = 2;
pub const STREAM_TEST_FUNCTION: u64 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    pub n_points: usize,
    pub length: f64,
    pub gamma: f64,
    pub forcing: FieldSpec,
    pub initial: FieldSpec,
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub dealias: bool,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    // experiment-specific
    pub mode_list: Option<Vec<i64>>,
    pub scale_list: Option<Vec<f64>>,
    pub k_interval: Option<(f64, f64)>,
    pub tau: Option<f64>,
    pub t_eval: Option<f64>,
    pub t_star: Option<f64>,
    pub n_samples: Option<usize>,
    pub spacing: Option<f64>,
    pub bump: Option<FieldSpec>,
    pub test_function: Option<FieldSpec>,
    pub c_tol: Option<f64>,
    pub refinements: Option<usize>,
}

const KEYS: &[&str] = &[
    "n_points",
    "length",
    "gamma",
    "forcing",
    "initial",
    "dt",
    "t_final",
    "record_every",
    "dealias",
    "seed",
    "output_dir",
    "mode_list",
    "scale_list",
    "k_interval",
    "tau",
    "t_eval",
    "t_star",
    "n_samples",
    "spacing",
    "bump",
    "test_function",
    "c_tol",
    "refinements",
];

struct Entries {
    map: HashMap<String, (String, usize)>,
    base_dir: PathBuf,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&(String, usize)> {
        self.map.get(key)
    }

    fn bad(key: &str, line: usize, msg: impl Into<String>) -> ConfigError {
        ConfigError::BadValue {
            key: key.into(),
            line,
            msg: msg.into(),
        }
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Self::bad(key, *line, format!("cannot parse `{v}`"))),
        }
    }

    fn req<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.opt(key)?.ok_or_else(|| ConfigError::MissingKey(key.into()))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<T>()
                        .map_err(|_| Self::bad(key, *line, format!("cannot parse `{}`", s.trim())))
                })
                .collect::<Result<Vec<T>, _>>()
                .map(Some),
        }
    }

    fn field(&self, key: &str) -> Result<Option<FieldSpec>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => FieldSpec::parse(v, &self.base_dir)
                .map(Some)
                .map_err(|msg| Self::bad(key, *line, msg)),
        }
    }

    fn line(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |(_, l)| *l)
    }
}

fn tokenize(text: &str, base_dir: &Path) -> Result<Entries, ConfigError> {
    let mut map: HashMap<String, (String, usize)> = HashMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::Malformed { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Malformed { line });
        }
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                key: key.into(),
                line,
            });
        }
        if map.contains_key(key) {
            return Err(ConfigError::DuplicateKey {
                key: key.into(),
                line,
            });
        }
        map.insert(key.into(), (value.into(), line));
    }
    Ok(Entries {
        map,
        base_dir: base_dir.to_path_buf(),
    })
}

/// Parses config text; `base_dir` anchors relative `file:` paths.
pub fn parse_config_str(
    text: &str,
    subcommand: Subcommand,
    base_dir: &Path,
) -> Result<ExperimentConfig, ConfigError> {
    let e = tokenize(text, base_dir)?;
    let dealias = match e.raw("dealias") {
        None => false,
        Some((v, line)) => match v.as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            _ => return Err(Entries::bad("dealias", *line, format!("expected a boolean, got `{v}`"))),
        },
    };
    let k_interval = match e.list::<f64>("k_interval")? {
        None => None,
        Some(v) if v.len() == 2 => Some((v[0], v[1])),
        Some(_) => return Err(Entries::bad("k_interval", e.line("k_interval"), "expected `a, b`")),
    };
    let cfg = ExperimentConfig {
        subcommand,
        n_points: e.req("n_points")?,
        length: e.req("length")?,
        gamma: e.req("gamma")?,
        forcing: e.field("forcing")?.unwrap_or(FieldSpec::Zero),
        initial: e.field("initial")?.unwrap_or(FieldSpec::Zero),
        dt: e.req("dt")?,
        t_final: e.req("t_final")?,
        record_every: e.opt("record_every")?.unwrap_or(1),
        dealias,
        seed: e.opt("seed")?.unwrap_or(0),
        output_dir: e.opt::<String>("output_dir")?.map(PathBuf::from),
        mode_list: e.list("mode_list")?,
        scale_list: e.list("scale_list")?,
        k_interval,
        tau: e.opt("tau")?,
        t_eval: e.opt("t_eval")?,
        t_star: e.opt("t_star")?,
        n_samples: e.opt("n_samples")?,
        spacing: e.opt("spacing")?,
        bump: e.field("bump")?,
        test_function: e.field("test_function")?,
        c_tol: e.opt("c_tol")?,
        refinements: e.opt("refinements")?,
    };
    cfg.validate(&e)?;
    Ok(cfg)
}

pub fn parse_config(path: &Path, subcommand: Subcommand) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|err| ConfigError::Read {
        path: path.to_path_buf(),
        msg: err.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&text, subcommand, base)
}

impl ExperimentConfig {
    fn validate(&self, e: &Entries) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Entries::bad(key, e.line(key), format!("must be positive, got {v}")))
            }
        };
        if self.n_points < 8 || !self.n_points.is_power_of_two() {
            return Err(Entries::bad(
                "n_points",
                e.line("n_points"),
                "must be a power of two >= 8",
            ));
        }
        positive("length", self.length)?;
        positive("dt", self.dt)?;
        positive("t_final", self.t_final)?;
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Entries::bad("gamma", e.line("gamma"), "must be >= 0"));
        }
        if self.dt > self.t_final {
            return Err(ConfigError::Invalid(format!(
                "dt={} exceeds t_final={}",
                self.dt, self.t_final
            )));
        }
        if self.record_every == 0 {
            return Err(Entries::bad("record_every", e.line("record_every"), "must be >= 1"));
        }
        let need = |present: bool, key: &str| {
            if present {
                Ok(())
            } else {
                Err(ConfigError::MissingKey(key.into()))
            }
        };
        match self.subcommand {
            Subcommand::Decay | Subcommand::Absorb if self.gamma <= 0.0 => {
                return Err(ConfigError::Invalid("envelope requires damping".into()));
            }
            Subcommand::Smoothing => {
                need(self.scale_list.is_some(), "scale_list")?;
            }
            Subcommand::BallIdentity => {
                need(self.tau.is_some(), "tau")?;
                if let Some(tau) = self.tau {
                    if tau < 0.0 {
                        return Err(Entries::bad("tau", e.line("tau"), "must be >= 0"));
                    }
                }
            }
            Subcommand::WeakContinuity => {
                need(self.mode_list.is_some(), "mode_list")?;
                need(self.bump.is_some(), "bump")?;
                need(self.test_function.is_some(), "test_function")?;
            }
            Subcommand::OmegaLimit => {
                need(self.t_star.is_some(), "t_star")?;
                need(self.n_samples.is_some(), "n_samples")?;
                need(self.spacing.is_some(), "spacing")?;
                positive("spacing", self.spacing.unwrap_or(0.0))?;
                if self.n_samples == Some(0) {
                    return Err(Entries::bad("n_samples", e.line("n_samples"), "must be >= 1"));
                }
            }
            Subcommand::Norms => {
                need(self.k_interval.is_some(), "k_interval")?;
            }
            _ => {}
        }
        if let Some(c) = self.c_tol {
            positive("c_tol", c)?;
        }
        Ok(())
    }

    pub fn grid(&self) -> crate::Result<Arc<Grid>> {
        Grid::new(self.n_points, self.length)
    }
}
