use std::path::PathBuf;

use thiserror::Error;

use crate::solver::StepDiagnostics;

pub type Result<T> = std::result::Result<T, NlsError>;

#[derive(Debug, Error)]
pub enum NlsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("incompatible grids")]
    IncompatibleGrids,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("blow-up or instability at t={t}")]
    BlowUp {
        t: f64,
        diagnostics: Vec<StepDiagnostics>,
    },

    #[error("duhamel residual requires gamma = 0 and f = 0 (got gamma={gamma}, |f|={forcing_norm})")]
    WrongRegime { gamma: f64, forcing_norm: f64 },

    #[error("not a norm: p = {0} < 1")]
    NotANorm(f64),

    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(f64, f64),

    #[error("envelope requires damping")]
    EnvelopeRequiresDamping,

    #[error("window out of range: {0}")]
    WindowOutOfRange(String),

    #[error("unresolved modulation: mode {mode} needs |n| < {limit}")]
    UnresolvedModulation { mode: i64, limit: usize },

    #[error("sampling before absorption: t_star={t_star}, entry={entry}")]
    SamplingBeforeAbsorption { t_star: f64, entry: String },

    #[error("snapshot outside absorbing ball: mass {mass} > {bound}")]
    OutsideBall { mass: f64, bound: f64 },

    #[error("{0}")]
    Config(#[from] crate::io::config::ConfigError),

    #[error("not a NLSA snapshot")]
    BadMagic,

    #[error("unsupported snapshot version {0}")]
    BadVersion(u32),

    #[error("truncated snapshot: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl NlsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        NlsError::Io {
            path: path.into(),
            source,
        }
    }
}
