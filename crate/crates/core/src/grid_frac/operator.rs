//! Discrete Riemann-Liouville integrals and derivatives on a uniform grid.
//!
//! Every left-sided operator has the form
//! `(Lf)_n = col0[n] f_0 + sum_{j=1..n} coef[n - j] f_j` with row 0 identically zero,
//! so only `coef` and `col0` are stored. Right-sided operators reuse the same data
//! through the reflection `w_right(n, j) = w_left(m - n, m - j)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::function::GridFunction;
use super::gamma::gamma_fn;
use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Integral,
    Derivative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FracOperator {
    kind: OperatorKind,
    order: f64,
    side: Side,
    grid: Grid,
    coef: Vec<f64>,
    col0: Vec<f64>,
}

/// `(k+1)^e - k^e` without cancellation for large `k`.
fn forward_diff_pow(k: f64, e: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        k.powf(e) * (e * (1.0 / k).ln_1p()).exp_m1()
    }
}

/// `(k+1)^e - 2 k^e + (k-1)^e` for `k >= 1`.
fn second_diff_pow(k: f64, e: f64) -> f64 {
    if k == 1.0 {
        return 2f64.powf(e) - 2.0;
    }
    let up = (e * (1.0 / k).ln_1p()).exp_m1();
    let down = (e * (-1.0 / k).ln_1p()).exp_m1();
    k.powf(e) * (up + down)
}

impl FracOperator {
    /// Product-trapezoid weights for the order-`gamma` integral.
    pub fn integral(grid: Grid, gamma: f64, side: Side) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!(
                "integral order must be positive, got {gamma}"
            )));
        }
        let m = grid.cells();
        let e = gamma + 1.0;
        let scale = grid.step().powf(gamma) / gamma_fn(gamma + 2.0)?;
        let mut coef = vec![0.0; m + 1];
        coef[0] = scale;
        for (k, c) in coef.iter_mut().enumerate().skip(1) {
            *c = scale * second_diff_pow(k as f64, e);
        }
        let mut col0 = vec![0.0; m + 1];
        for (n, c) in col0.iter_mut().enumerate().skip(1) {
            // (n-1)^e - (n-e) n^(e-1), rewritten to avoid cancellation
            let nf = n as f64;
            let v = nf.powf(e) * ((e * (-1.0 / nf).ln_1p()).exp_m1() + e / nf);
            *c = scale * v;
        }
        Ok(Self {
            kind: OperatorKind::Integral,
            order: gamma,
            side,
            grid,
            coef,
            col0,
        })
    }

    /// L1 weights for the order-`alpha` derivative, `0 < alpha <= 1`.
    ///
    /// Exact for the piecewise-linear interpolant of the samples. At `alpha = 1`
    /// this is the backward (left) or forward (right) difference.
    pub fn derivative(grid: Grid, alpha: f64, side: Side) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!(
                "derivative order must lie in (0, 1], got {alpha}"
            )));
        }
        let m = grid.cells();
        let beta = 1.0 - alpha;
        let scale = grid.step().powf(-alpha) / gamma_fn(2.0 - alpha)?;
        let b: Vec<f64> = (0..=m).map(|k| forward_diff_pow(k as f64, beta)).collect();
        let mut coef = vec![0.0; m + 1];
        coef[0] = scale * b[0];
        for k in 1..=m {
            coef[k] = scale * (b[k] - b[k - 1]);
        }
        let mut col0 = vec![0.0; m + 1];
        // f(0) t^{-alpha} / Gamma(1 - alpha) from the constant part; absent at alpha = 1
        let jump = if alpha < 1.0 {
            1.0 / gamma_fn(1.0 - alpha)?
        } else {
            0.0
        };
        for n in 1..=m {
            col0[n] = -scale * b[n - 1] + jump * grid.node(n).powf(-alpha);
        }
        Ok(Self {
            kind: OperatorKind::Derivative,
            order: alpha,
            side,
            grid,
            coef,
            col0,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Matrix entry `(n, j)`.
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        let m = self.grid.cells();
        let (n, j) = match self.side {
            Side::Left => (n, j),
            Side::Right => (m - n, m - j),
        };
        if n == 0 || j > n {
            0.0
        } else if j == 0 {
            self.col0[n]
        } else {
            self.coef[n - j]
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.grid.num_nodes();
        DMatrix::from_fn(n, n, |r, c| self.weight(r, c))
    }

    /// Applies the operator to one column of nodal samples.
    pub fn apply_slice(&self, f: &[f64]) -> Vec<f64> {
        let m = self.grid.cells();
        assert_eq!(f.len(), m + 1);
        let mut out = vec![0.0; m + 1];
        match self.side {
            Side::Left => left_apply(&self.coef, &self.col0, f, &mut out),
            Side::Right => {
                let rev: Vec<f64> = f.iter().rev().copied().collect();
                left_apply(&self.coef, &self.col0, &rev, &mut out);
                out.reverse();
            }
        }
        out
    }

    /// Applies the transposed operator to one column of nodal samples.
    pub fn apply_transpose_slice(&self, y: &[f64]) -> Vec<f64> {
        let m = self.grid.cells();
        assert_eq!(y.len(), m + 1);
        let mut out = vec![0.0; m + 1];
        match self.side {
            Side::Left => left_apply_transpose(&self.coef, &self.col0, y, &mut out),
            Side::Right => {
                let rev: Vec<f64> = y.iter().rev().copied().collect();
                left_apply_transpose(&self.coef, &self.col0, &rev, &mut out);
                out.reverse();
            }
        }
        out
    }

    /// Component-wise application.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.map_components(f, |c| self.apply_slice(c))
    }

    /// Component-wise application of the transpose.
    pub fn apply_transpose(&self, f: &GridFunction) -> Result<GridFunction> {
        self.map_components(f, |c| self.apply_transpose_slice(c))
    }

    fn map_components(
        &self,
        f: &GridFunction,
        op: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<GridFunction> {
        if *f.grid() != self.grid {
            return Err(Error::Dimension(format!(
                "operator grid {:?} does not match function grid {:?}",
                self.grid,
                f.grid()
            )));
        }
        let mut out = GridFunction::zeros(self.grid, f.dim());
        for c in 0..f.dim() {
            out.set_component(c, &op(&f.component(c)));
        }
        Ok(out)
    }
}

fn left_apply(coef: &[f64], col0: &[f64], f: &[f64], out: &mut [f64]) {
    for n in 1..f.len() {
        let mut acc = col0[n] * f[0];
        for j in 1..=n {
            acc += coef[n - j] * f[j];
        }
        out[n] = acc;
    }
}

fn left_apply_transpose(coef: &[f64], col0: &[f64], y: &[f64], out: &mut [f64]) {
    let len = y.len();
    out[0] = (1..len).map(|n| col0[n] * y[n]).sum();
    for j in 1..len {
        let mut acc = 0.0;
        for n in j..len {
            acc += coef[n - j] * y[n];
        }
        out[j] = acc;
    }
}

/// Order-`gamma` fractional integral of `f`.
pub fn frac_integral(f: &GridFunction, gamma: f64, side: Side) -> Result<GridFunction> {
    FracOperator::integral(*f.grid(), gamma, side)?.apply(f)
}

/// Order-`alpha` fractional derivative operator on `grid`.
pub fn frac_derivative_op(grid: Grid, alpha: f64, side: Side) -> Result<FracOperator> {
    FracOperator::derivative(grid, alpha, side)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize) -> Grid {
        Grid::new(1.0, m).unwrap()
    }

    fn rel_l2(g: &Grid, approx: &[f64], exact: &[f64]) -> f64 {
        let diff: Vec<f64> = approx
            .iter()
            .zip(exact)
            .map(|(a, b)| (a - b).powi(2))
            .collect();
        let ex: Vec<f64> = exact.iter().map(|b| b * b).collect();
        (g.integrate(&diff) / g.integrate(&ex)).sqrt()
    }

    fn gamma(z: f64) -> f64 {
        gamma_fn(z).unwrap()
    }

    #[test]
    fn order_one_integral_of_one_is_t() {
        let g = grid(64);
        let f = GridFunction::from_scalar(g, 1, 0, |_| 1.0);
        let out = frac_integral(&f, 1.0, Side::Left).unwrap();
        for (i, t) in g.nodes().enumerate() {
            assert!((out.row(i)[0] - t).abs() < 1e-10);
        }
    }

    #[test]
    fn half_integral_of_t_matches_power_rule() {
        let g = grid(1024);
        let f = GridFunction::from_scalar(g, 1, 0, |t| t);
        let out = frac_integral(&f, 0.5, Side::Left).unwrap();
        let c = gamma(2.0) / gamma(2.5);
        for (i, t) in g.nodes().enumerate() {
            assert!((out.row(i)[0] - c * t.powf(1.5)).abs() < 1e-4);
        }
    }

    #[test]
    fn half_derivative_of_t_matches_power_rule() {
        let g = grid(1024);
        let f = GridFunction::from_scalar(g, 1, 0, |t| t);
        let d = frac_derivative_op(g, 0.5, Side::Left).unwrap();
        let out = d.apply(&f).unwrap();
        let c = gamma(2.0) / gamma(1.5);
        for (i, t) in g.nodes().enumerate() {
            assert!((out.row(i)[0] - c * t.sqrt()).abs() < 1e-3);
        }
    }

    #[test]
    fn order_one_derivative_of_t_squared() {
        let g = grid(256);
        let f = GridFunction::from_scalar(g, 1, 0, |t| t * t);
        let out = frac_derivative_op(g, 1.0, Side::Left)
            .unwrap()
            .apply(&f)
            .unwrap();
        for (i, t) in g.nodes().enumerate().skip(1) {
            assert!((out.row(i)[0] - 2.0 * t).abs() <= 1.01 * g.step());
        }
    }

    #[test]
    fn order_one_derivative_of_sine() {
        let g = grid(2048);
        let f = GridFunction::from_scalar(g, 1, 0, |t| (std::f64::consts::PI * t).sin());
        let out = frac_derivative_op(g, 1.0, Side::Left)
            .unwrap()
            .apply(&f)
            .unwrap();
        let pi = std::f64::consts::PI;
        let worst = g
            .nodes()
            .enumerate()
            .skip(1)
            .map(|(i, t)| (out.row(i)[0] - pi * (pi * t).cos()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-3, "sup error {worst}");
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = grid(32);
        let z = GridFunction::zeros(g, 3);
        for side in [Side::Left, Side::Right] {
            assert!(frac_derivative_op(g, 0.5, side)
                .unwrap()
                .apply(&z)
                .unwrap()
                .is_zero());
            assert!(frac_integral(&z, 0.7, side).unwrap().is_zero());
        }
    }

    #[test]
    fn out_of_range_orders_are_rejected() {
        let g = grid(16);
        assert!(frac_derivative_op(g, 0.0, Side::Left).is_err());
        assert!(frac_derivative_op(g, 1.2, Side::Left).is_err());
        assert!(FracOperator::integral(g, -0.5, Side::Right).is_err());
    }

    #[test]
    fn triangular_structure() {
        let g = grid(12);
        let l = frac_derivative_op(g, 0.4, Side::Left).unwrap();
        let r = frac_derivative_op(g, 0.4, Side::Right).unwrap();
        for n in 0..=12 {
            for j in 0..=12 {
                if j > n {
                    assert_eq!(l.weight(n, j), 0.0);
                }
                if j < n {
                    assert_eq!(r.weight(n, j), 0.0);
                }
                assert_eq!(r.weight(n, j), l.weight(12 - n, 12 - j));
            }
        }
    }

    #[test]
    fn dense_and_matrix_free_agree() {
        let g = grid(40);
        let f = GridFunction::from_scalar(g, 1, 0, |t| (3.0 * t).sin() * t);
        let y = GridFunction::from_scalar(g, 1, 0, |t| t.exp());
        for side in [Side::Left, Side::Right] {
            let op = frac_derivative_op(g, 0.3, side).unwrap();
            let dense = op.to_dense();
            let fv = nalgebra::DVector::from_column_slice(f.values());
            let yv = nalgebra::DVector::from_column_slice(y.values());
            let a = op.apply(&f).unwrap();
            let at = op.apply_transpose(&y).unwrap();
            let da = &dense * &fv;
            let dat = dense.transpose() * &yv;
            for i in 0..g.num_nodes() {
                assert!((a.values()[i] - da[i]).abs() < 1e-10);
                assert!((at.values()[i] - dat[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn right_integral_of_one_is_distance_to_end() {
        let g = grid(50);
        let f = GridFunction::from_scalar(g, 1, 0, |_| 1.0);
        let out = frac_integral(&f, 0.5, Side::Right).unwrap();
        let c = 1.0 / gamma(1.5);
        for (i, t) in g.nodes().enumerate() {
            assert!((out.row(i)[0] - c * (1.0 - t).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn semigroup_on_monomials() {
        let g = grid(2048);
        for k in 0..=3 {
            let f = GridFunction::from_scalar(g, 1, 0, |t| t.powi(k));
            let twice = frac_integral(
                &frac_integral(&f, 0.3, Side::Left).unwrap(),
                0.6,
                Side::Left,
            )
            .unwrap()
            .component(0);
            let once = frac_integral(&f, 0.9, Side::Left).unwrap().component(0);
            assert!(rel_l2(&g, &twice, &once) < 1e-3, "k = {k}");
        }
    }

    #[test]
    fn power_rule_agreement_and_refinement() {
        for &alpha in &[0.25, 0.5, 0.75] {
            for mu in 1..=3 {
                let mut errs = Vec::new();
                for m in [1024usize, 2048] {
                    let g = grid(m);
                    let f = GridFunction::from_scalar(g, 1, 0, |t| t.powi(mu));
                    let c = gamma(mu as f64 + 1.0) / gamma(mu as f64 + 1.0 - alpha);
                    let exact: Vec<f64> =
                        g.nodes().map(|t| c * t.powf(mu as f64 - alpha)).collect();
                    let approx = frac_derivative_op(g, alpha, Side::Left)
                        .unwrap()
                        .apply(&f)
                        .unwrap()
                        .component(0);
                    errs.push(rel_l2(&g, &approx, &exact));
                }
                assert!(errs[0] <= 1e-2, "alpha {alpha} mu {mu}: {}", errs[0]);
                // linear data is reproduced exactly by the L1 scheme
                if errs[0] > 1e-12 {
                    assert!(
                        (errs[0] / errs[1]).log2() >= 1.0,
                        "alpha {alpha} mu {mu}: {errs:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn cubic_first_derivative_converges_linearly() {
        let cubic = |t: f64| t * t * t - 2.0 * t * t + 0.5 * t;
        let dcubic = |t: f64| 3.0 * t * t - 4.0 * t + 0.5;
        let mut errs = Vec::new();
        for m in [128usize, 256] {
            let g = grid(m);
            let f = GridFunction::from_scalar(g, 1, 0, cubic);
            let d = frac_derivative_op(g, 1.0, Side::Left)
                .unwrap()
                .apply(&f)
                .unwrap();
            let worst = g
                .nodes()
                .enumerate()
                .skip(1)
                .map(|(i, t)| (d.row(i)[0] - dcubic(t)).abs())
                .fold(0.0, f64::max);
            errs.push(worst);
        }
        assert!((errs[0] / errs[1]).log2() >= 0.9, "{errs:?}");
    }
}
