//! CSV emission for experiment reports.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! that parsing a cell back yields the same `f64`.

use std::path::Path;

use crate::error::{NlsError, Result};
use crate::lab::{
    AbsorbingBallReport, BallIdentityReport, OmegaLimitSample, SmoothingRow, WeakContinuityReport,
};
use crate::norms::NormReport;
use crate::solver::StepDiagnostics;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

/// Round-trip-safe float formatting, shared by CSV cells and summaries.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

/// Anything that can be written as one CSV table.
pub trait Table {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<Cell>>;
}

pub fn emit_csv(report: &dyn Table, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(report.header())?;
    for row in report.rows() {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush().map_err(|e| NlsError::io(path, e))
}

/// Per-step diagnostics of a run.
pub struct MassSeries<'a>(pub &'a [StepDiagnostics]);

impl Table for MassSeries<'_> {
    fn header(&self) -> Vec<&'static str> {
        vec!["t", "mass", "balance_residual", "linf"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.0
            .iter()
            .map(|d| vec![d.t.into(), d.mass.into(), d.balance_residual.into(), d.linf.into()])
            .collect()
    }
}

impl Table for AbsorbingBallReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["t", "l2_norm"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.mass_series
            .iter()
            .map(|&(t, n)| vec![t.into(), n.into()])
            .collect()
    }
}

impl Table for Vec<SmoothingRow> {
    fn header(&self) -> Vec<&'static str> {
        vec!["lambda", "norm", "fitted_c"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.iter()
            .map(|r| vec![r.lambda.into(), r.norm.into(), r.fitted_c.into()])
            .collect()
    }
}

impl Table for BallIdentityReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["tau", "t", "lhs", "rhs", "residual"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        vec![vec![
            self.tau.into(),
            self.t.into(),
            self.lhs.into(),
            self.rhs.into(),
            self.residual.into(),
        ]]
    }
}

impl Table for WeakContinuityReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["mode", "pairing_gap", "strong_gap"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.mode_list
            .iter()
            .zip(&self.pairing_gap)
            .zip(&self.strong_gap)
            .map(|((&m, &p), &s)| vec![m.into(), p.into(), s.into()])
            .collect()
    }
}

impl Table for OmegaLimitSample {
    fn header(&self) -> Vec<&'static str> {
        vec!["i", "j", "dist"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let mut rows = Vec::new();
        for (i, row) in self.pairwise_dist.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                rows.push(vec![i.into(), j.into(), d.into()]);
            }
        }
        rows
    }
}

impl Table for Vec<NormReport> {
    fn header(&self) -> Vec<&'static str> {
        vec!["name", "value", "n_points", "length", "dt_sample", "T"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.iter()
            .map(|r| {
                vec![
                    Cell::Text(r.name.clone()),
                    r.value.into(),
                    r.grid_meta.n_points.into(),
                    r.grid_meta.length.into(),
                    r.grid_meta.dt_sample.into(),
                    r.grid_meta.duration.into(),
                ]
            })
            .collect()
    }
}

/// One rung of a step-halving ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub error: f64,
    /// Error of the previous (coarser) rung over this one; NaN on the first.
    pub ratio: f64,
    pub balance_residual: f64,
    pub balance_ratio: f64,
}

impl Table for Vec<ConvergenceRow> {
    fn header(&self) -> Vec<&'static str> {
        vec!["dt", "error", "ratio", "balance_residual", "balance_ratio"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.iter()
            .map(|r| {
                vec![
                    r.dt.into(),
                    r.error.into(),
                    r.ratio.into(),
                    r.balance_residual.into(),
                    r.balance_ratio.into(),
                ]
            })
            .collect()
    }
}
