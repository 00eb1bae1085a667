use thiserror::Error;

use crate::solver::SolveResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grids or component counts of two operands disagree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A structural hypothesis on the model parameters is violated.
    #[error("invalid problem: {hypothesis}")]
    InvalidSpec { hypothesis: String },

    /// The mountain-pass endpoint does not have negative energy.
    #[error(
        "mountain-pass geometry not verified: endpoint energy {endpoint_energy:e} >= 0 \
         at log10(lambda) = {lambda_log10}"
    )]
    GeometryNotVerified {
        lambda_log10: f64,
        endpoint_energy: f64,
    },

    /// The solver ran out of iterations; the best iterate is attached.
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    MaxItersExceeded {
        iterations: usize,
        residual: f64,
        best: Box<SolveResult>,
    },

    /// The path maximizer slid into the trivial critical point.
    #[error("path collapsed towards zero: ||u||_V = {vnorm:e} < 1e-3 * nu = {threshold:e}")]
    DegenerateCollapse { vnorm: f64, threshold: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::InvalidSpec {
            hypothesis: msg.into(),
        }
    }
}
