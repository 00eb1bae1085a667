use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of subintervals.
pub const MIN_CELLS: usize = 8;

/// Uniform grid `t_i = i * h`, `i = 0..=m`, over `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    len: f64,
    cells: usize,
    step: f64,
}

impl Grid {
    pub fn new(len: f64, cells: usize) -> Result<Self> {
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::domain(format!(
                "interval length must be positive, got {len}"
            )));
        }
        if cells < MIN_CELLS {
            return Err(Error::domain(format!(
                "grid needs at least {MIN_CELLS} subintervals, got {cells}"
            )));
        }
        Ok(Self {
            len,
            cells,
            step: len / cells as f64,
        })
    }

    /// Interval length `T`.
    pub fn len(&self) -> f64 {
        self.len
    }

    /// Number of subintervals `m`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn num_nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Node `t_i`; the last node is exactly `T`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.cells {
            self.len
        } else {
            i as f64 * self.step
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.cells).map(move |i| self.node(i))
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.step; self.num_nodes()];
        w[0] = 0.5 * self.step;
        w[self.cells] = 0.5 * self.step;
        w
    }

    /// Composite trapezoid rule applied to nodal samples.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.num_nodes());
        let inner: f64 = samples[1..self.cells].iter().sum();
        self.step * (inner + 0.5 * (samples[0] + samples[self.cells]))
    }
}
