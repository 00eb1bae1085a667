//! Closed-form existence thresholds and a priori bounds, evaluated in log scale.

mod logreal;

pub use logreal::LogReal;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_frac::gamma_fn;
use crate::problem::ProblemSpec;
use crate::spaces::sup_embedding_constant;

/// `n!! = n (n - 2) (n - 4) ⋯`, with `0!! = 1!! = 1`.
pub fn double_factorial(n: u32) -> u128 {
    (1..=n).rev().step_by(2).map(u128::from).product()
}

/// `(p - 1)!! / p!!` as a product of ratios, so large `p` never overflows.
fn double_factorial_ratio(p: u32) -> f64 {
    let mut r = 1.0;
    let mut k = p;
    while k >= 2 {
        r *= (k - 1) as f64 / k as f64;
        k -= 2;
    }
    r
}

/// `||e||_{L^p}` for `e = (T/π) sin(πt/T)`.
pub fn compute_d(p: u32, t_len: f64) -> Result<LogReal> {
    if p < 2 {
        return Err(Error::domain(format!("compute_d needs p >= 2, got {p}")));
    }
    let pf = p as f64;
    let ratio = double_factorial_ratio(p);
    let inner = if p % 2 == 1 {
        LogReal::from_f64(t_len).powf(pf + 1.0) / LogReal::from_f64(PI).powf(pf + 1.0)
            * LogReal::from_f64(2.0 * ratio)
    } else {
        LogReal::from_f64(t_len).powf(pf + 1.0) / LogReal::from_f64(PI).powf(pf)
            * LogReal::from_f64(ratio)
    };
    Ok(inner.powf(1.0 / pf))
}

/// `(T^{p+1-pα} / (Γ(2-α)^p (p + 1 - pα)))^{1/p}`, an upper bound for `||D^α e||_{L^p}`.
pub fn compute_g(p: u32, alpha: f64, t_len: f64) -> Result<LogReal> {
    check_order(p, alpha)?;
    let pf = p as f64;
    let e = pf + 1.0 - pf * alpha;
    let inner = LogReal::from_f64(t_len).powf(e)
        / (LogReal::from_f64(gamma_fn(2.0 - alpha)?).powf(pf) * LogReal::from_f64(e));
    Ok(inner.powf(1.0 / pf))
}

/// `K G` with `K` the sup-embedding constant.
pub fn compute_g0(p: u32, alpha: f64, t_len: f64) -> Result<LogReal> {
    Ok(sup_constant(p, alpha, t_len)? * compute_g(p, alpha, t_len)?)
}

fn check_order(p: u32, alpha: f64) -> Result<()> {
    if p < 2 || !(alpha > 1.0 / p as f64 && alpha <= 1.0) {
        return Err(Error::domain(format!(
            "need p >= 2 and 1/p < alpha <= 1, got p = {p}, alpha = {alpha}"
        )));
    }
    Ok(())
}

/// `T^{α-1/p} / (Γ(α) (αq - q + 1)^{1/q})`.
fn sup_constant(p: u32, alpha: f64, t_len: f64) -> Result<LogReal> {
    check_order(p, alpha)?;
    let pf = p as f64;
    let q = pf / (pf - 1.0);
    let den =
        LogReal::from_f64(gamma_fn(alpha)?) * LogReal::from_f64(alpha * q - q + 1.0).powf(1.0 / q);
    Ok(LogReal::from_f64(t_len).powf(alpha - 1.0 / pf) / den)
}

/// Mountain-pass level bound `c_λ <= C* λ^{-(p-1)/(q1-p)}`.
pub fn compute_c_star(spec: &ProblemSpec) -> Result<LogReal> {
    let pf = spec.p as f64;
    let g = spec.growth();
    let (_, vmax) = spec.potential_bounds();
    let d = compute_d(spec.p, spec.t_len)?;
    let gg = compute_g(spec.p, spec.alpha, spec.t_len)?;
    if !(g.q1 > pf) {
        return Err(Error::hypothesis(format!(
            "growth condition requires q1 > p, got q1 = {}",
            g.q1
        )));
    }
    let mq = g.m1 * g.q1;
    let first = 1.0 / (pf * mq.powf(pf / (g.q1 - pf))) - g.m1 / mq.powf(g.q1 / (g.q1 - pf));
    if !(first > 0.0) {
        return Err(Error::domain(format!(
            "C* prefactor is not positive ({first})"
        )));
    }
    let dp_gp = d.powf(pf) + gg.powf(pf);
    let ratio = LogReal::from_f64(vmax.max(1.0)).powf(1.0 / pf) * dp_gp.powf(1.0 / pf)
        / (LogReal::from_f64(spec.t_len).powf(1.0 / g.q1 - 1.0 / pf) * d);
    Ok(LogReal::from_f64(first) * ratio.powf(pf * g.q1 / (g.q1 - pf)))
}

/// Every explicit constant, in log scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    #[serde(rename = "D")]
    pub d: LogReal,
    #[serde(rename = "G")]
    pub g: LogReal,
    #[serde(rename = "G0")]
    pub g0: LogReal,
    #[serde(rename = "C_star")]
    pub c_star: LogReal,
    /// `ν_λ = nu_coeff · λ^{-1/(q2-p)}`.
    pub nu_coeff: LogReal,
    /// Ring-positivity branch of `Λ1`.
    pub lambda1_ring: LogReal,
    /// Negative-endpoint branch of `Λ1`.
    pub lambda1_endpoint: LogReal,
    #[serde(rename = "Lambda1")]
    pub lambda1: LogReal,
    #[serde(rename = "Lambda2")]
    pub lambda2: LogReal,
    #[serde(rename = "Lambda3")]
    pub lambda3: LogReal,
    pub lambda_star: LogReal,
    /// Which of `Lambda1..3` attains `lambda_star` (1-based).
    pub lambda_star_index: u8,
    pub theta: f64,
    /// `p^2 θ / (a^{p-1} (θ - p^2)) · C*`, the `||u_λ||_V^p` bound at `λ = 1`.
    pub bound_coeff: LogReal,
    /// `K` in `||u||_∞ <= K ||u||_V`.
    pub sup_coeff: LogReal,
    /// `(p - 1)/(q1 - p)`, the decay exponent of the bounds.
    pub decay_exponent: f64,
    pub v_min: f64,
    pub v_max: f64,
}

pub fn compute_lambdas(spec: &ProblemSpec) -> Result<ConstantsReport> {
    spec.validate()?;
    let pf = spec.p as f64;
    let q = spec.conjugate();
    let gc = spec.growth();
    let theta = gc.theta();
    if !(theta > pf * pf) {
        return Err(Error::hypothesis(format!(
            "theta = min(beta, q2) must exceed p^2 = {}, got {theta}",
            pf * pf
        )));
    }
    let (vmin, vmax) = spec.potential_bounds();
    let lr = LogReal::from_f64;
    let a = lr(spec.a);
    let b = lr(spec.b);
    let t = lr(spec.t_len);
    let delta = lr(gc.delta);

    let d = compute_d(spec.p, spec.t_len)?;
    let g = compute_g(spec.p, spec.alpha, spec.t_len)?;
    let k = sup_constant(spec.p, spec.alpha, spec.t_len)?;
    let g0 = k * g;
    let c_star = compute_c_star(spec)?;
    let dp_gp = d.powf(pf) + g.powf(pf);
    let gamma_part = lr(gamma_fn(spec.alpha)?) * lr(spec.alpha * q - q + 1.0).powf(1.0 / q);

    let e2 = gc.q2 - pf;
    let lambda1_ring = lr(vmin) * a.powf(pf - 1.0) * (gamma_part * g0).powf(e2)
        / (lr(2.0 * pf * pf * gc.m2)
            * t.powf((spec.alpha - 1.0 / pf) * e2)
            * (delta * lr(vmin.min(1.0)) * d).powf(e2));

    let path_norm = a + b * delta.powf(pf) / g0.powf(pf) * lr(vmax.max(1.0)) * dp_gp;
    let lambda1_endpoint = path_norm.powf(pf)
        / (b * lr(pf * pf))
        / (lr(gc.m1) * delta.powf(gc.q1) / g0.powf(gc.q1)
            * t.powf(1.0 - gc.q1 / pf)
            * d.powf(gc.q1));
    let lambda1 = lambda1_ring.max(lambda1_endpoint);

    let lambda2 = (a + b * lr(vmax.max(1.0)).powf(pf) * delta.powf(pf) / g0.powf(pf) * dp_gp)
        .powf(gc.q1 * (pf - 1.0));

    let bound_coeff = lr(pf * pf * theta) / (a.powf(pf - 1.0) * lr(theta - pf * pf)) * c_star;
    let lambda3 =
        (t.powf(pf * spec.alpha - 1.0) / gamma_part.powf(pf) * bound_coeff * lr(2f64.powf(pf))
            / delta.powf(pf))
        .powf((gc.q1 - pf) / (pf - 1.0));

    let mut lambda_star = lambda1;
    let mut lambda_star_index = 1;
    for (i, l) in [(2u8, lambda2), (3, lambda3)] {
        if l > lambda_star {
            lambda_star = l;
            lambda_star_index = i;
        }
    }

    let nu_coeff =
        (a.powf(pf - 1.0) * lr(vmin) / (lr(2.0 * pf * pf * gc.m2) * k.powf(e2))).powf(1.0 / e2);

    Ok(ConstantsReport {
        d,
        g,
        g0,
        c_star,
        nu_coeff,
        lambda1_ring,
        lambda1_endpoint,
        lambda1,
        lambda2,
        lambda3,
        lambda_star,
        lambda_star_index,
        theta,
        bound_coeff,
        sup_coeff: lr(sup_embedding_constant(spec)?),
        decay_exponent: (pf - 1.0) / (gc.q1 - pf),
        v_min: vmin,
        v_max: vmax,
    })
}

/// Ring radius `ν_λ` on which the modified energy is at least `d_λ`.
pub fn nu_lambda(spec: &ProblemSpec, lambda: f64) -> Result<f64> {
    let pf = spec.p as f64;
    let gc = spec.growth();
    let (vmin, _) = spec.potential_bounds();
    let k = sup_embedding_constant(spec)?;
    let e2 = gc.q2 - pf;
    let lr = LogReal::from_f64;
    let val = (lr(spec.a).powf(pf - 1.0) * lr(vmin)
        / (lr(2.0 * pf * pf * gc.m2) * lr(lambda) * lr(k).powf(e2)))
    .powf(1.0 / e2);
    Ok(val.to_f64())
}

/// `d_λ = (a^{p-1}/p^2) ν^p - λ (M2/V_min) K^{q2-p} ν^{q2}`.
pub fn d_lambda(spec: &ProblemSpec, lambda: f64) -> Result<f64> {
    let pf = spec.p as f64;
    let gc = spec.growth();
    let (vmin, _) = spec.potential_bounds();
    let k = sup_embedding_constant(spec)?;
    let nu = nu_lambda(spec, lambda)?;
    Ok(spec.a.powf(pf - 1.0) / (pf * pf) * nu.powf(pf)
        - lambda * gc.m2 / vmin * k.powf(gc.q2 - pf) * nu.powf(gc.q2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelBound {
    pub value: LogReal,
    /// False when `λ < max(Λ1, Λ2)`, where the bound is not guaranteed.
    pub hypothesis_met: bool,
}

/// `C* λ^{-(p-1)/(q1-p)}`.
pub fn c_lambda_upper(spec: &ProblemSpec, lambda: LogReal) -> Result<LevelBound> {
    let rep = compute_lambdas(spec)?;
    Ok(c_lambda_upper_from(&rep, lambda))
}

pub fn c_lambda_upper_from(rep: &ConstantsReport, lambda: LogReal) -> LevelBound {
    LevelBound {
        value: rep.c_star * lambda.powf(-rep.decay_exponent),
        hypothesis_met: lambda >= rep.lambda1.max(rep.lambda2),
    }
}

/// `bound_coeff · λ^{-(p-1)/(q1-p)}`, the bound on `||u_λ||_V^p`.
pub fn vnorm_pow_bound(rep: &ConstantsReport, lambda: LogReal) -> LogReal {
    rep.bound_coeff * lambda.powf(-rep.decay_exponent)
}

/// `K (vnorm_pow_bound)^{1/p}`, the bound on `||u_λ||_∞`.
pub fn sup_bound(rep: &ConstantsReport, p: u32, lambda: LogReal) -> LogReal {
    rep.sup_coeff * vnorm_pow_bound(rep, lambda).powf(1.0 / p as f64)
}
