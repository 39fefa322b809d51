//! Pseudospectral laboratory for the weakly damped, forced cubic
//! Schrödinger equation
//!
//! ```text
//! u_t + γu + i u_xx + i|u|^2 u = f
//! ```
//!
//! on a periodic box, integrated by Strang splitting with exact sub-flows.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod lab;
pub mod norms;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod tolerances;

pub use error::{NlsError, Result};
pub use field::{inner_product, l2_norm, ComplexField, RunMeta, SpaceTimeField};
pub use grid::Grid;
pub use num_complex::Complex64;
pub use solver::{integrate, Run, SolverParams, StepDiagnostics};
