//! Mountain-pass solutions of Kirchhoff-type fractional p-Laplacian Dirichlet systems,
//! with explicit parameter thresholds and a posteriori bound verification.

// negated comparisons are deliberate: they reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod constants;
pub mod energy;
pub mod error;
pub mod grid_frac;
pub mod nonlinearity;
pub mod problem;
pub mod solver;
pub mod spaces;
pub mod verify;

pub use constants::{compute_lambdas, ConstantsReport, LogReal};
pub use error::{Error, Result};
pub use grid_frac::{Grid, GridFunction};
pub use problem::{benchmark_spec, Model, NonlinearitySpec, Potential, ProblemSpec};
pub use solver::{solve, sweep, MountainPassConfig, SolveResult, SweepEntry};
pub use verify::{check_bounds, check_decay, check_geometry, BoundVerdicts, Verdict};
