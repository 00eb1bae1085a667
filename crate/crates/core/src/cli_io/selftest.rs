use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::compute_lambdas;
use crate::energy::{energy, energy_gradient, pairing};
use crate::error::Result;
use crate::grid_frac::{frac_integral, lanczos_gamma, FracOperator, Grid, GridFunction, Side};
use crate::nonlinearity::check_growth;
use crate::problem::{benchmark_spec, Model};
use crate::solver::test_element;
use crate::spaces::norm_report;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl SuiteReport {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Self::new(name, pass, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

/// Runs every suite; `gamma_coeffs` feeds the Gamma suite only, so a corrupted table
/// shows up there and nowhere else.
pub fn run_selftest(gamma_coeffs: &[f64; 9]) -> Vec<SuiteReport> {
    vec![
        gamma_suite(gamma_coeffs),
        SuiteReport::from_result("operators", operator_suite()),
        SuiteReport::from_result("norms", norm_suite()),
        SuiteReport::from_result("gradient", gradient_suite()),
        SuiteReport::from_result("growth", growth_suite()),
        SuiteReport::from_result("constants", constants_suite()),
    ]
}

fn gamma_suite(coeffs: &[f64; 9]) -> SuiteReport {
    let reference = [
        (0.1, 9.513_507_698_668_732),
        (0.5, PI.sqrt()),
        (1.0, 1.0),
        (2.5, 1.329_340_388_179_137),
        (5.0, 24.0),
        (10.5, 1_133_278.388_948_785_6),
    ];
    let worst = reference
        .iter()
        .map(|&(z, g)| ((lanczos_gamma(coeffs, z) - g) / g).abs())
        .fold(
            0.0f64,
            |a, e| if e.is_nan() { f64::INFINITY } else { a.max(e) },
        );
    SuiteReport::new(
        "gamma",
        worst <= 1e-12,
        format!("max relative error {worst:.2e}"),
    )
}

fn rel_l2(grid: &Grid, approx: &[f64], exact: &[f64], skip_first: bool) -> f64 {
    let start = usize::from(skip_first);
    let w = grid.trapezoid_weights();
    let (mut num, mut den) = (0.0, 0.0);
    for i in start..approx.len() {
        num += w[i] * (approx[i] - exact[i]).powi(2);
        den += w[i] * exact[i].powi(2);
    }
    (num / den).sqrt()
}

fn derivative_error(alpha: f64, cells: usize) -> Result<f64> {
    let grid = Grid::new(1.0, cells)?;
    let d = FracOperator::derivative(grid, alpha, Side::Left)?;
    let f: Vec<f64> = grid.nodes().map(|t| t * t).collect();
    let c = 2.0 / crate::grid_frac::gamma_fn(3.0 - alpha)?;
    let exact: Vec<f64> = grid.nodes().map(|t| c * t.powf(2.0 - alpha)).collect();
    Ok(rel_l2(&grid, &d.apply_slice(&f), &exact, false))
}

fn operator_suite() -> Result<(bool, String)> {
    let coarse = derivative_error(0.5, 512)?;
    let fine = derivative_error(0.5, 1024)?;
    let order = (coarse / fine).log2();

    let grid = Grid::new(1.0, 1024)?;
    let f = GridFunction::from_scalar(grid, 1, 0, |t| t);
    let gamma = 0.7;
    let c = 1.0 / crate::grid_frac::gamma_fn(2.0 + gamma)?;
    let exact: Vec<f64> = grid.nodes().map(|t| c * t.powf(1.0 + gamma)).collect();
    let int_err = rel_l2(
        &grid,
        frac_integral(&f, gamma, Side::Left)?.values(),
        &exact,
        false,
    );

    let d1 = FracOperator::derivative(grid, 1.0, Side::Left)?;
    let s: Vec<f64> = grid.nodes().map(f64::sin).collect();
    let cos: Vec<f64> = grid.nodes().map(f64::cos).collect();
    let classical = rel_l2(&grid, &d1.apply_slice(&s), &cos, true);

    let pass = fine <= 1e-2 && order >= 1.0 && int_err <= 1e-2 && classical <= 1e-3;
    Ok((
        pass,
        format!(
            "derivative error {fine:.2e} (order {order:.2}), integral error {int_err:.2e}, alpha = 1 error {classical:.2e}"
        ),
    ))
}

fn norm_suite() -> Result<(bool, String)> {
    let spec = benchmark_spec();
    let rep = compute_lambdas(&spec)?;
    let model = Model::new(spec, 4096)?;
    let n = norm_report(&model, &test_element(&model))?;
    let d = rep.d.to_f64();
    let g = rep.g.to_f64();
    let lp_err = (n.lp_norm - d).abs() / d;
    let pass = lp_err <= 1e-3 && n.frac_seminorm <= 1.01 * g;
    Ok((
        pass,
        format!(
            "||e||_L3 relative error {lp_err:.2e}; seminorm {:.6} vs G {g:.6}",
            n.frac_seminorm
        ),
    ))
}

fn gradient_suite() -> Result<(bool, String)> {
    let model = Model::new(benchmark_spec(), 64)?;
    let lambda = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut random = |amp: f64| {
        let mut u = GridFunction::from_fn(model.grid, 2, |_, o| {
            for x in o.iter_mut() {
                *x = amp * (rng.random::<f64>() * 2.0 - 1.0);
            }
        });
        u.enforce_dirichlet();
        u
    };
    let mut worst = 0.0f64;
    for k in 0..10 {
        let u = random(0.2 + 0.1 * k as f64);
        let v = random(1.0);
        let g = energy_gradient(&model, &u, lambda)?;
        let analytic = pairing(&g, &v)?;
        let eps = 1e-6;
        let mut plus = u.clone();
        plus.axpy(eps, &v)?;
        let mut minus = u.clone();
        minus.axpy(-eps, &v)?;
        let fd = (energy(&model, &plus, lambda, true)?.total
            - energy(&model, &minus, lambda, true)?.total)
            / (2.0 * eps);
        worst = worst.max((analytic - fd).abs() / analytic.abs().max(fd.abs()));
    }
    Ok((
        worst <= 1e-6,
        format!("max relative directional error {worst:.2e} over 10 points"),
    ))
}

fn growth_suite() -> Result<(bool, String)> {
    let spec = benchmark_spec();
    let r = check_growth(spec.nl(), spec.t_len, spec.dim, 20_000, 1);
    let violations = r.extended_growth.violations
        + r.extended_superlinearity.violations
        + r.lower_growth.violations
        + r.upper_growth.violations
        + r.superlinearity.violations;
    Ok((
        r.all_pass(),
        format!("{violations} violations in 20000 samples per inequality"),
    ))
}

fn constants_suite() -> Result<(bool, String)> {
    let rep = compute_lambdas(&benchmark_spec())?;
    let d = (4.0f64 / 3.0).cbrt() * PI.powf(-4.0 / 3.0);
    let g = (16.0f64 / 5.0).cbrt() / PI.sqrt();
    let g0 = 5f64.powf(-1.0 / 3.0) * 16f64.powf(2.0 / 3.0) / PI;
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let worst = rel(rep.d.to_f64(), d)
        .max(rel(rep.g.to_f64(), g))
        .max(rel(rep.g0.to_f64(), g0));
    let ls = rep.lambda_star.log10_abs();
    let pass = worst <= 1e-12 && (ls - 54.316).abs() <= 0.01;
    Ok((
        pass,
        format!("D, G, G0 max relative error {worst:.1e}; log10 lambda* = {ls:.4}"),
    ))
}
