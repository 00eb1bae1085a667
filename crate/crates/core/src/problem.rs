//! Model parameters and their grid-level discretization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_frac::{frac_derivative_op, FracOperator, Grid, Side};
use crate::nonlinearity::{GrowthConstants, Nonlinearity, PowerFamily};

/// Number of samples used to estimate `min V` and `max V` on `[0, T]`.
pub const POTENTIAL_SAMPLES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Potential {
    /// `V(t) = sum_k coeffs[k] t^k`.
    Poly {
        coeffs: Vec<f64>,
    },
    Const {
        value: f64,
    },
}

impl Potential {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Potential::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Potential::Const { value } => *value,
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.nodes().map(|t| self.eval(t)).collect()
    }

    /// `(min V, max V)` over a dense uniform sampling of `[0, t_len]` that includes both ends.
    pub fn bounds(&self, t_len: f64) -> (f64, f64) {
        match self {
            Potential::Const { value } => (*value, *value),
            Potential::Poly { .. } => {
                let n = POTENTIAL_SAMPLES;
                (0..=n)
                    .map(|i| {
                        self.eval(if i == n {
                            t_len
                        } else {
                            t_len * i as f64 / n as f64
                        })
                    })
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    })
            }
        }
    }
}

/// Nonlinearities that can be named in a problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NonlinearitySpec {
    Power(PowerFamily),
}

impl NonlinearitySpec {
    pub fn as_dyn(&self) -> &dyn Nonlinearity {
        match self {
            NonlinearitySpec::Power(f) => f,
        }
    }

    pub fn constants(&self) -> GrowthConstants {
        self.as_dyn().constants()
    }
}

/// Parameters `a, b, p, alpha, T, N, V, F` of the Dirichlet system; `lambda` is supplied per call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub a: f64,
    pub b: f64,
    pub p: u32,
    pub alpha: f64,
    pub t_len: f64,
    pub dim: usize,
    pub potential: Potential,
    pub nonlinearity: NonlinearitySpec,
}

impl ProblemSpec {
    /// Checks every structural hypothesis; the error names the first one violated.
    pub fn validate(&self) -> Result<()> {
        let p = self.p as f64;
        if !(self.a > 0.0) || !(self.b > 0.0) {
            return Err(Error::hypothesis(
                "Kirchhoff coefficients require a > 0 and b > 0",
            ));
        }
        if self.p < 2 {
            return Err(Error::hypothesis("p must be an integer >= 2"));
        }
        if !(self.alpha > 1.0 / p && self.alpha <= 1.0) {
            return Err(Error::hypothesis(format!(
                "fractional order requires 1/p < alpha <= 1, got alpha = {}",
                self.alpha
            )));
        }
        if !(self.t_len > 0.0) || !self.t_len.is_finite() {
            return Err(Error::hypothesis("interval length T must be positive"));
        }
        if self.dim == 0 {
            return Err(Error::hypothesis("component count N must be at least 1"));
        }
        let (vmin, vmax) = self.potential_bounds();
        if !(vmin > 0.0) || !vmax.is_finite() {
            return Err(Error::hypothesis(format!(
                "potential requires min V > 0 on [0, T], got min V = {vmin}"
            )));
        }
        let g = self.nonlinearity.constants();
        if !(g.delta > 0.0) {
            return Err(Error::hypothesis(
                "local smoothness radius requires delta > 0",
            ));
        }
        if !(g.q1 > p * p) {
            return Err(Error::hypothesis(format!(
                "growth condition requires q1 > p^2 = {}, got q1 = {}",
                p * p,
                g.q1
            )));
        }
        if !(g.q2 > p * p && g.q2 < g.q1) {
            return Err(Error::hypothesis(format!(
                "growth condition requires q2 in (p^2, q1) = ({}, {}), got q2 = {}",
                p * p,
                g.q1,
                g.q2
            )));
        }
        if !(g.m1 > 0.0 && g.m2 > 0.0) {
            return Err(Error::hypothesis(
                "growth condition requires M1 > 0 and M2 > 0",
            ));
        }
        if !(g.beta > p * p) {
            return Err(Error::hypothesis(format!(
                "superlinearity condition requires beta > p^2 = {}, got beta = {}",
                p * p,
                g.beta
            )));
        }
        match &self.nonlinearity {
            NonlinearitySpec::Power(f) => f.validate(self.t_len),
        }
    }

    pub fn potential_bounds(&self) -> (f64, f64) {
        self.potential.bounds(self.t_len)
    }

    /// Conjugate exponent `q = p / (p - 1)`.
    pub fn conjugate(&self) -> f64 {
        let p = self.p as f64;
        p / (p - 1.0)
    }

    pub fn nl(&self) -> &dyn Nonlinearity {
        self.nonlinearity.as_dyn()
    }

    pub fn growth(&self) -> GrowthConstants {
        self.nonlinearity.constants()
    }
}

/// A [`ProblemSpec`] together with everything that depends on the grid.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ProblemSpec,
    pub grid: Grid,
    pub deriv: FracOperator,
    pub weights: Vec<f64>,
    pub v: Vec<f64>,
}

impl Model {
    pub fn new(spec: ProblemSpec, cells: usize) -> Result<Self> {
        spec.validate()?;
        let grid = Grid::new(spec.t_len, cells)?;
        Self::on_grid(spec, grid)
    }

    /// Like [`Model::new`] but skips hypothesis validation; used to probe invalid inputs.
    pub fn on_grid(spec: ProblemSpec, grid: Grid) -> Result<Self> {
        if grid.len() != spec.t_len {
            return Err(Error::Dimension(format!(
                "grid length {} differs from T = {}",
                grid.len(),
                spec.t_len
            )));
        }
        let deriv = frac_derivative_op(grid, spec.alpha, Side::Left)?;
        let weights = grid.trapezoid_weights();
        let v = spec.potential.sample(&grid);
        Ok(Self {
            spec,
            grid,
            deriv,
            weights,
            v,
        })
    }

    pub fn p(&self) -> f64 {
        self.spec.p as f64
    }
}

/// The two-component benchmark: `V = 7t^2 + 1`, `F = (1 + t)|x|^11`, `a = b = T = 1`, `p = 3`, `alpha = 1/2`.
pub fn benchmark_spec() -> ProblemSpec {
    ProblemSpec {
        a: 1.0,
        b: 1.0,
        p: 3,
        alpha: 0.5,
        t_len: 1.0,
        dim: 2,
        potential: Potential::Poly {
            coeffs: vec![1.0, 0.0, 7.0],
        },
        nonlinearity: NonlinearitySpec::Power(PowerFamily {
            c0: 1.0,
            c1: 1.0,
            r: 11.0,
            delta: 1.0,
            q1: 12.0,
            q2: 10.0,
            m1: 1.0,
            m2: 2.0,
            beta: 10.0,
        }),
    }
}
