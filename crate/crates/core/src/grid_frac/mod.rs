//! Uniform grids, the Gamma function and discrete fractional operators.

mod function;
mod gamma;
mod grid;
mod operator;

pub(crate) use function::euclid;
pub use function::GridFunction;
pub use gamma::{gamma_fn, lanczos_gamma, ln_gamma, LANCZOS_COEFFS, LANCZOS_G};
pub use grid::{Grid, MIN_CELLS};
pub use operator::{frac_derivative_op, frac_integral, FracOperator, OperatorKind, Side};
