//! Mountain-pass solver for a nontrivial critical point of the modified energy.
//!
//! The iterate is stored in scaled units `w = u / ν_λ`. Each outer iteration keeps
//! a path `0 → P → far ray point → endpoint` whose highest node is the current
//! candidate `P`, itself the maximizer of the energy along its own ray. The candidate
//! moves by preconditioned steepest descent on the ray-maximum energy `Φ(w) = max_s E(s w)`
//! with Armijo backtracking. Once the residual has dropped far enough, or descent
//! stalls, Newton steps on the gradient finish the job.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    compute_g0, compute_lambdas, d_lambda, nu_lambda, vnorm_pow_bound, LogReal,
};
use crate::energy::{
    energy, energy_gradient, kirchhoff_excess, kirchhoff_from_s, pairing, residual_norm,
};
use crate::error::{Error, Result};
use crate::grid_frac::{euclid, GridFunction};
use crate::nonlinearity::{f_bar, grad_f_bar};
use crate::problem::{Model, ProblemSpec};
use crate::spaces::{norm_powers, norm_report, NormReport};
use crate::verify::{check_bounds, BoundVerdicts};

/// Collapse threshold on `||u||_V / ν_λ`.
pub const COLLAPSE_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MountainPassConfig {
    /// Nodes of the discrete path, at least 16.
    pub path_points: usize,
    pub max_outer_iters: usize,
    /// Target residual relative to `a^{p-1} ν_λ^{p-1}`.
    pub descent_tol: f64,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub grid_m: usize,
    pub seed: u64,
    /// Newton refinement starts once the residual falls below this fraction of the initial one.
    pub newton_switch: f64,
    pub newton: bool,
    /// Relative slack on every a priori bound during verification.
    pub bound_slack: f64,
}

impl Default for MountainPassConfig {
    fn default() -> Self {
        Self {
            path_points: 33,
            max_outer_iters: 5000,
            descent_tol: 1e-8,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            grid_m: 512,
            seed: 0,
            newton_switch: 1e-3,
            newton: true,
            bound_slack: 0.05,
        }
    }
}

impl MountainPassConfig {
    pub fn validate(&self) -> Result<()> {
        if self.path_points < 16 {
            return Err(Error::domain(format!(
                "path_points must be >= 16, got {}",
                self.path_points
            )));
        }
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(self.descent_tol > 0.0) || !unit(self.armijo_c) || !unit(self.armijo_shrink) {
            return Err(Error::domain(
                "tolerances must be positive and Armijo constants in (0, 1)",
            ));
        }
        if !(self.newton_switch > 0.0) || !(self.bound_slack >= 0.0) {
            return Err(Error::domain(
                "newton_switch must be positive and bound_slack nonnegative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub u: GridFunction,
    pub lambda_log10: f64,
    /// `Ī_λ(u)`, the approximate mountain-pass level.
    pub c_lambda: f64,
    /// Dual residual relative to `a^{p-1} ν_λ^{p-1}`.
    pub residual: f64,
    pub residual_abs: f64,
    pub norms: NormReport,
    pub nu: f64,
    pub d: f64,
    pub iterations: usize,
    pub descent_iterations: usize,
    pub newton_iterations: usize,
    /// Times the path maximum sat off the candidate's ray and the candidate was replaced.
    pub path_switches: usize,
    pub geometry_ok: bool,
    pub endpoint_energy: f64,
    pub residual_history: Vec<f64>,
    pub seed: u64,
    pub bounds: Option<BoundVerdicts>,
}

/// `e = ((T/π) sin(πt/T), 0, …, 0)`.
pub fn test_element(model: &Model) -> GridFunction {
    let t_len = model.grid.len();
    let pi = std::f64::consts::PI;
    GridFunction::dirichlet_from_fn(model.grid, model.spec.dim, |t, out| {
        out[0] = t_len / pi * (pi * t / t_len).sin()
    })
}

/// Endpoint `(δ / G0) e` of every admissible path.
pub fn path_endpoint(model: &Model) -> Result<GridFunction> {
    let spec = &model.spec;
    let g0 = compute_g0(spec.p, spec.alpha, spec.t_len)?.to_f64();
    Ok(test_element(model).scaled(spec.growth().delta / g0))
}

/// Straight path `s_j (δ/G0) e`, `s_j = j / (n - 1)`; errors unless the endpoint energy is negative.
pub fn initial_path(
    spec: &ProblemSpec,
    lambda: f64,
    cfg: &MountainPassConfig,
) -> Result<Vec<GridFunction>> {
    cfg.validate()?;
    let model = Model::new(spec.clone(), cfg.grid_m)?;
    let end = path_endpoint(&model)?;
    check_endpoint(&model, &end, lambda)?;
    let n = cfg.path_points;
    Ok((0..n)
        .map(|j| end.scaled(j as f64 / (n - 1) as f64))
        .collect())
}

fn check_endpoint(model: &Model, end: &GridFunction, lambda: f64) -> Result<f64> {
    let e = energy(model, end, lambda, true)?.total;
    if !(e < 0.0) {
        return Err(Error::GeometryNotVerified {
            lambda_log10: lambda.log10(),
            endpoint_energy: e,
        });
    }
    Ok(e)
}

/// Energy evaluations in scaled units for one `(model, λ)`.
struct Scaled<'a> {
    model: &'a Model,
    lambda: f64,
    nu: f64,
    /// `a^{p-1} ν^{p-1}`.
    res_scale: f64,
    /// `ν^p`.
    e_scale: f64,
}

/// A point together with its cached `||u||_V^p` (in physical units).
#[derive(Clone)]
struct Point {
    w: GridFunction,
    s: f64,
}

impl<'a> Scaled<'a> {
    fn phys(&self, w: &GridFunction) -> GridFunction {
        w.scaled(self.nu)
    }

    fn point(&self, w: GridFunction) -> Result<Point> {
        let s = norm_powers(self.model, &self.phys(&w))?.v();
        Ok(Point { w, s })
    }

    fn force_integral(&self, u: &GridFunction) -> f64 {
        let m = self.model;
        let nl = m.spec.nl();
        u.rows()
            .enumerate()
            .map(|(i, r)| m.weights[i] * f_bar(m.grid.node(i), r, nl))
            .sum()
    }

    /// Scaled energy of `s · pt`.
    fn ray_energy(&self, pt: &Point, s: f64) -> f64 {
        let spec = &self.model.spec;
        let u = pt.w.scaled(s * self.nu);
        let sv = pt.s * s.powi(spec.p as i32);
        (kirchhoff_excess(spec.a, spec.b, spec.p, sv) - self.lambda * self.force_integral(&u))
            / self.e_scale
    }

    /// `d/ds E(s u)` up to the positive factor `ν^p`, with `u` the physical point.
    fn ray_slope(&self, pt: &Point, s: f64) -> f64 {
        let m = self.model;
        let spec = &m.spec;
        let p = spec.p as i32;
        let u = self.phys(&pt.w);
        let nl = spec.nl();
        let mut gf = vec![0.0; u.dim()];
        let mut su = vec![0.0; u.dim()];
        let mut force = 0.0;
        for (i, r) in u.rows().enumerate() {
            for (a, b) in su.iter_mut().zip(r) {
                *a = s * b;
            }
            grad_f_bar(m.grid.node(i), &su, nl, &mut gf);
            force += m.weights[i] * gf.iter().zip(r).map(|(a, b)| a * b).sum::<f64>();
        }
        let a_coef = kirchhoff_from_s(m, pt.s * s.powi(p));
        a_coef * s.powi(p - 1) * pt.s - self.lambda * force
    }

    /// `argmax_s E(s u)` by bisection in `log s`.
    fn ray_max(&self, pt: &Point) -> Result<f64> {
        if pt.s == 0.0 {
            return Err(Error::DegenerateCollapse {
                vnorm: 0.0,
                threshold: COLLAPSE_RATIO * self.nu,
            });
        }
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        let mut guard = 0;
        while self.ray_slope(pt, lo) <= 0.0 {
            lo *= 0.5;
            guard += 1;
            if guard > 400 {
                return Err(Error::domain("energy has no increasing part along the ray"));
            }
        }
        guard = 0;
        while self.ray_slope(pt, hi) > 0.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 400 {
                return Err(Error::domain("energy is unbounded along the ray"));
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if self.ray_slope(pt, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        Ok((lo * hi).sqrt())
    }

    /// Moves `pt` to the maximum of its ray.
    fn to_ray_max(&self, pt: Point) -> Result<(Point, f64)> {
        let s = self.ray_max(&pt)?;
        let p = self.model.spec.p as i32;
        let moved = Point {
            w: pt.w.scaled(s),
            s: pt.s * s.powi(p),
        };
        let e = self.ray_energy(&moved, 1.0);
        Ok((moved, e))
    }

    fn energy(&self, w: &GridFunction) -> Result<f64> {
        Ok(energy(self.model, &self.phys(w), self.lambda, true)?.total / self.e_scale)
    }

    /// Physical-unit gradient co-vector and its relative residual.
    fn gradient(&self, w: &GridFunction) -> Result<(GridFunction, f64)> {
        let g = energy_gradient(self.model, &self.phys(w), self.lambda)?;
        let r = residual_norm(&g, self.model.spec.p) / self.res_scale;
        Ok((g, r))
    }

    fn check_collapse(&self, pt: &Point) -> Result<()> {
        let vnorm = pt.s.powf(1.0 / self.model.p());
        let threshold = COLLAPSE_RATIO * self.nu;
        if !(vnorm >= threshold) {
            return Err(Error::DegenerateCollapse { vnorm, threshold });
        }
        Ok(())
    }
}

/// Riesz map of the discrete `||·||_V`-type inner product on interior nodes.
struct Preconditioner {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    interior: usize,
}

impl Preconditioner {
    fn new(model: &Model, dense: &DMatrix<f64>) -> Result<Self> {
        let m = model.grid.cells();
        let n = m - 1;
        let d_int = dense.columns(1, n).into_owned();
        let mut scaled = d_int.clone();
        for (r, mut row) in scaled.row_iter_mut().enumerate() {
            row *= model.weights[r];
        }
        let mut gram = d_int.tr_mul(&scaled);
        for i in 0..n {
            gram[(i, i)] += model.weights[i + 1] * model.v[i + 1];
        }
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::domain("preconditioner is not positive definite"))?;
        Ok(Self { chol, interior: n })
    }

    /// Direction `-M^{-1} (h g)`, per component.
    fn direction(&self, g: &GridFunction) -> GridFunction {
        let h = g.grid().step();
        let mut out = GridFunction::zeros(*g.grid(), g.dim());
        for c in 0..g.dim() {
            let col = g.component(c);
            let rhs = DVector::from_iterator(
                self.interior,
                col[1..=self.interior].iter().map(|v| -h * v),
            );
            let sol = self.chol.solve(&rhs);
            let mut full = vec![0.0; self.interior + 2];
            full[1..=self.interior].copy_from_slice(sol.as_slice());
            out.set_component(c, &full);
        }
        out
    }
}

/// Hessian of the energy at physical `u`, restricted to interior nodes of `active` components.
fn hessian(
    model: &Model,
    dense: &DMatrix<f64>,
    u: &GridFunction,
    lambda: f64,
    active: &[usize],
) -> Result<DMatrix<f64>> {
    let spec = &model.spec;
    let p = spec.p as i32;
    let pf = spec.p as f64;
    let m = model.grid.cells();
    let n = m - 1;
    let na = active.len();
    let dim = u.dim();
    let du = model.deriv.apply(u)?;
    let s = norm_powers(model, u)?.v();
    let a_coef = kirchhoff_from_s(model, s);
    let kir2 = (pf - 1.0) * spec.b * (spec.a + spec.b * s).powi(p - 2) / pf;

    // J(y) = |y|^{p-2} I + (p-2)|y|^{p-4} y yᵀ
    let jac = |y: &[f64], c1: usize, c2: usize| -> f64 {
        let r = euclid(y);
        let diag = if c1 == c2 { r.powi(p - 2) } else { 0.0 };
        if r == 0.0 || p == 2 {
            return if p == 2 { diag } else { 0.0 };
        }
        diag + (pf - 2.0) * r.powi(p - 4) * y[c1] * y[c2]
    };

    let d_int = dense.columns(1, n).into_owned();
    let mut h = DMatrix::<f64>::zeros(n * na, n * na);
    for (b1, &c1) in active.iter().enumerate() {
        for (b2, &c2) in active.iter().enumerate().skip(b1) {
            let mut scaled = d_int.clone();
            for (r, mut row) in scaled.row_iter_mut().enumerate() {
                row *= model.weights[r] * jac(du.row(r), c1, c2);
            }
            let block = d_int.tr_mul(&scaled);
            h.view_mut((b1 * n, b2 * n), (n, n))
                .copy_from(&(block * a_coef));
            if b1 != b2 {
                let bt = h.view((b1 * n, b2 * n), (n, n)).transpose();
                h.view_mut((b2 * n, b1 * n), (n, n)).copy_from(&bt);
            }
        }
    }

    let nl = spec.nl();
    let mut gp = vec![0.0; dim];
    let mut gm = vec![0.0; dim];
    for i in 1..m {
        let t = model.grid.node(i);
        let x = u.row(i);
        let w = model.weights[i];
        let xn = euclid(x);
        // ∇²F̄ by central differences of the analytic gradient
        let mut hf = vec![0.0; dim * dim];
        if xn > 0.0 {
            let step = 1e-5 * xn;
            let mut xp = x.to_vec();
            for c in 0..dim {
                xp[c] = x[c] + step;
                grad_f_bar(t, &xp, nl, &mut gp);
                xp[c] = x[c] - step;
                grad_f_bar(t, &xp, nl, &mut gm);
                xp[c] = x[c];
                for r in 0..dim {
                    hf[r * dim + c] = (gp[r] - gm[r]) / (2.0 * step);
                }
            }
        }
        for (b1, &c1) in active.iter().enumerate() {
            for (b2, &c2) in active.iter().enumerate() {
                let sym = 0.5 * (hf[c1 * dim + c2] + hf[c2 * dim + c1]);
                h[(b1 * n + i - 1, b2 * n + i - 1)] +=
                    a_coef * w * model.v[i] * jac(x, c1, c2) - lambda * w * sym;
            }
        }
    }

    // rank-one Kirchhoff coupling: kir'' ∇S ∇Sᵀ
    let mut flux = GridFunction::zeros(model.grid, dim);
    for i in 0..=m {
        let y = du.row(i);
        let c = model.weights[i] * euclid(y).powi(p - 2);
        for (o, v) in flux.row_mut(i).iter_mut().zip(y) {
            *o = c * v;
        }
    }
    let dt = model.deriv.apply_transpose(&flux)?;
    let mut grad_s = DVector::<f64>::zeros(n * na);
    for (b, &c) in active.iter().enumerate() {
        for i in 1..m {
            let x = u.row(i);
            grad_s[b * n + i - 1] =
                pf * (dt.row(i)[c] + model.weights[i] * model.v[i] * euclid(x).powi(p - 2) * x[c]);
        }
    }
    h.ger(kir2, &grad_s, &grad_s, 1.0);
    Ok(h)
}

fn active_components(w: &GridFunction, g: &GridFunction) -> Vec<usize> {
    (0..w.dim())
        .filter(|&c| {
            w.rows()
                .zip(g.rows())
                .any(|(a, b)| a[c] != 0.0 || b[c] != 0.0)
        })
        .collect()
}

/// One damped Newton step; `None` when no damping reduces the residual.
fn newton_step(
    sc: &Scaled,
    dense: &DMatrix<f64>,
    w: &GridFunction,
    g: &GridFunction,
    res: f64,
) -> Result<Option<(GridFunction, GridFunction, f64)>> {
    let model = sc.model;
    let u = sc.phys(w);
    let active = active_components(w, g);
    if active.is_empty() {
        return Ok(None);
    }
    let n = model.grid.cells() - 1;
    let h = model.grid.step();
    let hess = hessian(model, dense, &u, sc.lambda, &active)?;
    let mut rhs = DVector::<f64>::zeros(n * active.len());
    for (b, &c) in active.iter().enumerate() {
        for i in 1..=n {
            rhs[b * n + i - 1] = -h * g.row(i)[c];
        }
    }
    let Some(step) = hess.lu().solve(&rhs) else {
        return Ok(None);
    };
    let mut du = GridFunction::zeros(model.grid, w.dim());
    for (b, &c) in active.iter().enumerate() {
        for i in 1..=n {
            du.row_mut(i)[c] = step[b * n + i - 1] / sc.nu;
        }
    }
    let mut tau = 1.0;
    for _ in 0..12 {
        let mut trial = w.clone();
        trial.axpy(tau, &du)?;
        let (gt, rt) = sc.gradient(&trial)?;
        if rt.is_finite() && rt < res {
            return Ok(Some((trial, gt, rt)));
        }
        tau *= 0.5;
    }
    Ok(None)
}

/// Discrete path through the candidate: nodes `0 … P` on its ray, the ray continued
/// to a point of negative energy, then a straight segment to the common endpoint.
fn build_path(
    sc: &Scaled,
    cand: &Point,
    endpoint: &GridFunction,
    points: usize,
) -> Result<(Vec<f64>, usize, Vec<GridFunction>)> {
    let k = (points - 1) / 2;
    let k2 = k + (points - 1 - k) / 2;
    let mut far = 2.0;
    while sc.ray_energy(cand, far) >= 0.0 {
        far *= 2.0;
        if far > 1e12 {
            return Err(Error::domain(
                "energy does not become negative along the candidate ray",
            ));
        }
    }
    let far_w = cand.w.scaled(far);
    let mut energies = Vec::with_capacity(points);
    let mut segment = Vec::new();
    for j in 0..=k {
        energies.push(sc.ray_energy(cand, j as f64 / k as f64));
    }
    for j in k + 1..=k2 {
        let s = 1.0 + (far - 1.0) * (j - k) as f64 / (k2 - k) as f64;
        energies.push(sc.ray_energy(cand, s));
    }
    for j in k2 + 1..points {
        let tau = (j - k2) as f64 / (points - 1 - k2) as f64;
        let mut node = far_w.scaled(1.0 - tau);
        node.axpy(tau, endpoint)?;
        energies.push(sc.energy(&node)?);
        segment.push(node);
    }
    Ok((energies, k, segment))
}

fn first_argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

/// Runs the mountain-pass iteration at `λ` and verifies the result.
pub fn solve(spec: &ProblemSpec, lambda: f64, cfg: &MountainPassConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    let model = Model::new(spec.clone(), cfg.grid_m)?;
    let endpoint_phys = path_endpoint(&model)?;
    let endpoint_energy = check_endpoint(&model, &endpoint_phys, lambda)?;

    let nu = nu_lambda(spec, lambda)?;
    let d = d_lambda(spec, lambda)?;
    let pf = model.p();
    let sc = Scaled {
        model: &model,
        lambda,
        nu,
        res_scale: spec.a.powf(pf - 1.0) * nu.powf(pf - 1.0),
        e_scale: nu.powf(pf),
    };
    let endpoint = endpoint_phys.scaled(1.0 / nu);
    let dense = model.deriv.to_dense();
    let precond = Preconditioner::new(&model, &dense)?;

    let (mut cand, mut phi) = sc.to_ray_max(sc.point(test_element(&model))?)?;
    let (mut g, mut res) = sc.gradient(&cand.w)?;
    let r0 = res;
    let mut history = vec![res];
    let mut best = (cand.w.clone(), res);
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut descent_iterations = 0;
    let mut newton_iterations = 0;
    let mut path_switches = 0;
    let mut newton_blocked_above = f64::INFINITY;

    while res > cfg.descent_tol {
        if iterations >= cfg.max_outer_iters {
            let best_result = finish(
                &sc,
                spec,
                cfg,
                &best.0,
                best.1,
                iterations,
                descent_iterations,
                newton_iterations,
                path_switches,
                endpoint_energy,
                d,
                history.clone(),
                false,
            )?;
            return Err(Error::MaxItersExceeded {
                iterations,
                residual: best.1,
                best: Box::new(best_result),
            });
        }
        iterations += 1;

        let newton_ready =
            cfg.newton && res <= cfg.newton_switch * r0 && res < newton_blocked_above;
        if newton_ready {
            if let Some((w, gn, rn)) = newton_step(&sc, &dense, &cand.w, &g, res)? {
                newton_iterations += 1;
                cand = sc.point(w)?;
                sc.check_collapse(&cand)?;
                phi = sc.ray_energy(&cand, 1.0);
                g = gn;
                res = rn;
                history.push(res);
                if res < best.1 {
                    best = (cand.w.clone(), res);
                }
                continue;
            }
            // Newton made no progress here; resume descent until the residual halves
            newton_blocked_above = 0.5 * res;
        }

        // locate the path maximizer, lowest index on ties
        let (energies, k, segment) = build_path(&sc, &cand, &endpoint, cfg.path_points)?;
        let top = first_argmax(&energies);
        if top > k && energies[top] > phi && top > energies.len() - 1 - segment.len() {
            let node = segment[top - (energies.len() - segment.len())].clone();
            let (moved, e) = sc.to_ray_max(sc.point(node)?)?;
            cand = moved;
            phi = e;
            let (gn, rn) = sc.gradient(&cand.w)?;
            g = gn;
            res = rn;
            path_switches += 1;
        }

        let dir = precond.direction(&g).scaled(nu.powf(1.0 - pf));
        let slope = pairing(&g, &dir)? * nu / sc.e_scale;
        let mut t = (2.0 * step).min(1.0);
        let mut accepted = None;
        while t > 1e-14 {
            let mut trial = cand.w.clone();
            trial.axpy(t, &dir)?;
            let (moved, e) = sc.to_ray_max(sc.point(trial)?)?;
            if e <= phi + cfg.armijo_c * t * slope {
                accepted = Some((moved, e));
                break;
            }
            t *= cfg.armijo_shrink;
        }
        match accepted {
            Some((moved, e)) => {
                descent_iterations += 1;
                step = t;
                cand = moved;
                phi = e;
                sc.check_collapse(&cand)?;
                let (gn, rn) = sc.gradient(&cand.w)?;
                g = gn;
                res = rn;
                history.push(res);
                if res < best.1 {
                    best = (cand.w.clone(), res);
                }
            }
            None => {
                // energy differences are below round-off: only Newton can go further
                let attempt = if cfg.newton {
                    newton_step(&sc, &dense, &cand.w, &g, res)?
                } else {
                    None
                };
                let Some((w, gn, rn)) = attempt else {
                    let best_result = finish(
                        &sc,
                        spec,
                        cfg,
                        &best.0,
                        best.1,
                        iterations,
                        descent_iterations,
                        newton_iterations,
                        path_switches,
                        endpoint_energy,
                        d,
                        history.clone(),
                        false,
                    )?;
                    return Err(Error::MaxItersExceeded {
                        iterations,
                        residual: best.1,
                        best: Box::new(best_result),
                    });
                };
                newton_iterations += 1;
                newton_blocked_above = f64::INFINITY;
                step = 1.0;
                cand = sc.point(w)?;
                sc.check_collapse(&cand)?;
                phi = sc.ray_energy(&cand, 1.0);
                g = gn;
                res = rn;
                history.push(res);
                if res < best.1 {
                    best = (cand.w.clone(), res);
                }
            }
        }
    }
    finish(
        &sc,
        spec,
        cfg,
        &cand.w,
        res,
        iterations,
        descent_iterations,
        newton_iterations,
        path_switches,
        endpoint_energy,
        d,
        history,
        true,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    sc: &Scaled,
    spec: &ProblemSpec,
    cfg: &MountainPassConfig,
    w: &GridFunction,
    res: f64,
    iterations: usize,
    descent_iterations: usize,
    newton_iterations: usize,
    path_switches: usize,
    endpoint_energy: f64,
    d: f64,
    residual_history: Vec<f64>,
    verify: bool,
) -> Result<SolveResult> {
    let u = sc.phys(w);
    let norms = norm_report(sc.model, &u)?;
    if verify && !(norms.v_norm >= COLLAPSE_RATIO * sc.nu) {
        return Err(Error::DegenerateCollapse {
            vnorm: norms.v_norm,
            threshold: COLLAPSE_RATIO * sc.nu,
        });
    }
    let c_lambda = energy(sc.model, &u, sc.lambda, true)?.total;
    let (g, _) = sc.gradient(w)?;
    let mut result = SolveResult {
        u,
        lambda_log10: sc.lambda.log10(),
        c_lambda,
        residual: res,
        residual_abs: residual_norm(&g, spec.p),
        norms,
        nu: sc.nu,
        d,
        iterations,
        descent_iterations,
        newton_iterations,
        path_switches,
        geometry_ok: endpoint_energy < 0.0,
        endpoint_energy,
        residual_history,
        seed: cfg.seed,
        bounds: None,
    };
    if verify {
        let rep = compute_lambdas(spec)?;
        result.bounds = Some(check_bounds(&result, spec, &rep, cfg.bound_slack)?);
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub lambda_log10: f64,
    pub vnorm: f64,
    pub supnorm: f64,
    pub c_lambda: f64,
    pub residual: f64,
    /// A priori bound on `||u_λ||_V^p`.
    pub vnorm_pow_bound: f64,
    /// `(bound - ||u_λ||_V^p) / bound`.
    pub margin: f64,
    /// `"ok"` or the error message of a failed solve.
    pub status: String,
}

impl SweepEntry {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Independent solves at each `log10 λ`, run in parallel; failures are recorded per entry.
pub fn sweep(
    spec: &ProblemSpec,
    lambda_log10s: &[f64],
    cfg: &MountainPassConfig,
) -> Result<Vec<SweepEntry>> {
    if lambda_log10s.is_empty() {
        return Ok(Vec::new());
    }
    let rep = compute_lambdas(spec)?;
    Ok(lambda_log10s
        .par_iter()
        .map(|&l| {
            let bound = vnorm_pow_bound(&rep, LogReal::from_log10(l)).to_f64();
            match solve(spec, 10f64.powf(l), cfg) {
                Ok(r) => {
                    let vp = r.norms.v_norm.powf(spec.p as f64);
                    SweepEntry {
                        lambda_log10: l,
                        vnorm: r.norms.v_norm,
                        supnorm: r.norms.sup_norm,
                        c_lambda: r.c_lambda,
                        residual: r.residual,
                        vnorm_pow_bound: bound,
                        margin: (bound - vp) / bound,
                        status: "ok".into(),
                    }
                }
                Err(e) => SweepEntry {
                    lambda_log10: l,
                    vnorm: f64::NAN,
                    supnorm: f64::NAN,
                    c_lambda: f64::NAN,
                    residual: f64::NAN,
                    vnorm_pow_bound: bound,
                    margin: f64::NAN,
                    status: e.to_string(),
                },
            }
        })
        .collect())
}
