use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};

/// An `R^N`-valued function sampled on a [`Grid`]; row `i` holds `u(t_i)`.
///
/// Values are stored row-major, `(m + 1) * N` entries. Functions in the
/// solution space have zero rows at both ends; see [`GridFunction::is_dirichlet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    dim: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid, dim: usize) -> Self {
        assert!(dim >= 1, "component count must be positive");
        Self {
            grid,
            dim,
            values: vec![0.0; grid.num_nodes() * dim],
        }
    }

    pub fn from_values(grid: Grid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.len() != grid.num_nodes() * dim {
            return Err(Error::Dimension(format!(
                "expected {} x {dim} values, got {}",
                grid.num_nodes(),
                values.len()
            )));
        }
        Ok(Self { grid, dim, values })
    }

    /// Samples `f(t, out)` at every node.
    pub fn from_fn(grid: Grid, dim: usize, mut f: impl FnMut(f64, &mut [f64])) -> Self {
        let mut u = Self::zeros(grid, dim);
        for i in 0..grid.num_nodes() {
            let t = grid.node(i);
            f(t, u.row_mut(i));
        }
        u
    }

    /// Samples a scalar function into component `comp`; the other components are zero.
    pub fn from_scalar(grid: Grid, dim: usize, comp: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, dim, |t, out| out[comp] = f(t))
    }

    /// Like [`GridFunction::from_fn`] but with both end rows forced to zero.
    pub fn dirichlet_from_fn(grid: Grid, dim: usize, f: impl FnMut(f64, &mut [f64])) -> Self {
        let mut u = Self::from_fn(grid, dim, f);
        u.enforce_dirichlet();
        u
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.grid.num_nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.dim)
    }

    /// Samples of component `c`.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.rows().map(|r| r[c]).collect()
    }

    pub fn set_component(&mut self, c: usize, samples: &[f64]) {
        assert_eq!(samples.len(), self.num_nodes());
        let dim = self.dim;
        for (i, s) in samples.iter().enumerate() {
            self.values[i * dim + c] = *s;
        }
    }

    /// Euclidean norm of each row.
    pub fn row_norms(&self) -> Vec<f64> {
        self.rows().map(euclid).collect()
    }

    pub fn is_dirichlet(&self) -> bool {
        let m = self.grid.cells();
        self.row(0).iter().all(|v| *v == 0.0) && self.row(m).iter().all(|v| *v == 0.0)
    }

    pub fn enforce_dirichlet(&mut self) {
        let m = self.grid.cells();
        self.row_mut(0).fill(0.0);
        self.row_mut(m).fill(0.0);
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Errors unless `other` lives on the same grid with the same component count.
    pub fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "grid/dim mismatch: ({:?}, N={}) vs ({:?}, N={})",
                self.grid, self.dim, other.grid, other.dim
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &GridFunction) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Largest entry-wise difference.
    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn euclid(x: &[f64]) -> f64 {
    if x.len() == 1 {
        x[0].abs()
    } else {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
