//! The Kirchhoff energy functional, its gradient and the discrete dual residual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_frac::{euclid, GridFunction};
use crate::nonlinearity::{f_bar, grad_f_bar};
use crate::problem::Model;
use crate::spaces::{frac_rows, norm_powers, norm_powers_with};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `(a + b S)^p / (b p^2)` with `S = ||u||_V^p`.
    pub kirchhoff_term: f64,
    /// `λ ∫ F̄(t, u)` (or `λ ∫ F` for the unmodified functional).
    pub potential_term: f64,
    /// `a^p / (b p^2)`.
    pub constant_shift: f64,
    /// `kirchhoff_term - potential_term - constant_shift`, with the first difference
    /// expanded binomially so that tiny `S` does not cancel.
    pub total: f64,
    pub log10_abs_total: f64,
}

/// `((a + bS)^p - a^p) / (b p^2)` without cancellation.
pub fn kirchhoff_excess(a: f64, b: f64, p: u32, s: f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for k in 1..=p {
        binom = binom * (p - k + 1) as f64 / k as f64;
        acc += binom * a.powi((p - k) as i32) * b.powi(k as i32 - 1) * s.powi(k as i32);
    }
    acc / (p * p) as f64
}

/// `(a + b ||u||_V^p)^{p-1}`.
pub fn kirchhoff_coefficient(model: &Model, u: &GridFunction) -> Result<f64> {
    let s = norm_powers(model, u)?.v();
    Ok(kirchhoff_from_s(model, s))
}

pub(crate) fn kirchhoff_from_s(model: &Model, s: f64) -> f64 {
    let spec = &model.spec;
    (spec.a + spec.b * s).powi(spec.p as i32 - 1)
}

/// `∫ F̄(t, u(t)) dt` by the trapezoid rule.
pub fn f_bar_integral(model: &Model, u: &GridFunction) -> f64 {
    let nl = model.spec.nl();
    u.rows()
        .enumerate()
        .map(|(i, r)| model.weights[i] * f_bar(model.grid.node(i), r, nl))
        .sum()
}

fn f_integral(model: &Model, u: &GridFunction) -> f64 {
    let nl = model.spec.nl();
    u.rows()
        .enumerate()
        .map(|(i, r)| model.weights[i] * nl.eval(model.grid.node(i), r))
        .sum()
}

/// `Ī_λ(u)` when `modified`, otherwise `I_λ(u)`, which needs `||u||_∞ <= δ`.
pub fn energy(
    model: &Model,
    u: &GridFunction,
    lambda: f64,
    modified: bool,
) -> Result<EnergyBreakdown> {
    let spec = &model.spec;
    let s = norm_powers(model, u)?.v();
    let integral = if modified {
        f_bar_integral(model, u)
    } else {
        let sup = u.row_norms().into_iter().fold(0.0, f64::max);
        let delta = spec.growth().delta;
        if sup > delta {
            return Err(Error::domain(format!(
                "unmodified functional needs ||u||_inf <= delta = {delta}, got {sup}"
            )));
        }
        f_integral(model, u)
    };
    let p = spec.p;
    let denom = spec.b * (p * p) as f64;
    let potential_term = lambda * integral;
    let total = kirchhoff_excess(spec.a, spec.b, p, s) - potential_term;
    Ok(EnergyBreakdown {
        kirchhoff_term: (spec.a + spec.b * s).powi(p as i32) / denom,
        potential_term,
        constant_shift: spec.a.powi(p as i32) / denom,
        total,
        log10_abs_total: total.abs().log10(),
    })
}

/// Writes `|y|^{p-2} y` into `out`.
fn phi_p(y: &[f64], p: u32, out: &mut [f64]) {
    let c = euclid(y).powi(p as i32 - 2);
    for (o, v) in out.iter_mut().zip(y) {
        *o = c * v;
    }
}

/// Nodal co-vector `g` of `Ī'_λ(u)`: `h Σ_i (g_i, v_i)` is the pairing `⟨Ī'_λ(u), v⟩`
/// for every `v` vanishing at both ends. Both end rows of `g` are zero.
pub fn energy_gradient(model: &Model, u: &GridFunction, lambda: f64) -> Result<GridFunction> {
    let spec = &model.spec;
    if spec.p < 2 {
        return Err(Error::domain("gradient assembly needs p >= 2"));
    }
    let du = frac_rows(model, u)?;
    let s = norm_powers_with(model, u, &du).v();
    let a_coef = kirchhoff_from_s(model, s);
    let dim = u.dim();
    let w = &model.weights;

    let mut flux = GridFunction::zeros(model.grid, dim);
    for (i, &wi) in w.iter().enumerate() {
        phi_p(du.row(i), spec.p, flux.row_mut(i));
        flux.row_mut(i).iter_mut().for_each(|v| *v *= wi);
    }
    let mut g = model.deriv.apply_transpose(&flux)?;

    let h = model.grid.step();
    let nl = spec.nl();
    let mut phi = vec![0.0; dim];
    let mut gf = vec![0.0; dim];
    for (i, (&wi, &vi)) in w.iter().zip(&model.v).enumerate() {
        let t = model.grid.node(i);
        phi_p(u.row(i), spec.p, &mut phi);
        grad_f_bar(t, u.row(i), nl, &mut gf);
        for (c, gi) in g.row_mut(i).iter_mut().enumerate() {
            *gi = (a_coef * (*gi + wi * vi * phi[c]) - lambda * wi * gf[c]) / h;
        }
    }
    g.enforce_dirichlet();
    Ok(g)
}

/// `h Σ_i (g_i, v_i)`.
pub fn pairing(g: &GridFunction, v: &GridFunction) -> Result<f64> {
    g.check_compatible(v)?;
    let h = g.grid().step();
    Ok(h * g
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a * b)
        .sum::<f64>())
}

/// `(h Σ_i |g_i|^q)^{1/q}` with `q = p / (p - 1)`.
pub fn residual_norm(g: &GridFunction, p: u32) -> f64 {
    let p = p as f64;
    let q = p / (p - 1.0);
    let h = g.grid().step();
    let sum: f64 = g.rows().map(|r| euclid(r).powf(q)).sum();
    (h * sum).powf(1.0 / q)
}

/// `(a + b||u||_V^p)^{p-1} ||u||_V^p - λ ∫ (∇F̄(t,u), u)`.
pub fn self_pairing(model: &Model, u: &GridFunction, lambda: f64) -> Result<f64> {
    let s = norm_powers(model, u)?.v();
    let nl = model.spec.nl();
    let mut gf = vec![0.0; u.dim()];
    let mut force = 0.0;
    for (i, r) in u.rows().enumerate() {
        grad_f_bar(model.grid.node(i), r, nl, &mut gf);
        force += model.weights[i] * gf.iter().zip(r).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(kirchhoff_from_s(model, s) * s - lambda * force)
}
