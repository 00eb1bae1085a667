//! Discrete norms on the solution space and the embedding inequalities between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_frac::{euclid, gamma_fn, GridFunction};
use crate::problem::{Model, ProblemSpec};

/// Absolute slack applied to every embedding inequality.
pub const EMBEDDING_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `||u||_{L^p}`.
    pub lp_norm: f64,
    /// `||D^α u||_{L^p}` with the left derivative.
    pub frac_seminorm: f64,
    /// `(frac_seminorm^p + lp_norm^p)^{1/p}`.
    pub e_norm: f64,
    /// `(frac_seminorm^p + ∫ V|u|^p)^{1/p}`.
    pub v_norm: f64,
    /// Largest Euclidean row norm.
    pub sup_norm: f64,
}

/// The p-th powers behind a [`NormReport`], exposed for the energy assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NormPowers {
    pub frac: f64,
    pub lp: f64,
    pub weighted: f64,
}

impl NormPowers {
    /// `||u||_V^p`.
    pub fn v(&self) -> f64 {
        self.frac + self.weighted
    }
}

fn check_model(model: &Model, u: &GridFunction) -> Result<()> {
    if *u.grid() != model.grid || u.dim() != model.spec.dim {
        return Err(Error::Dimension(format!(
            "function on ({:?}, N={}) does not match model ({:?}, N={})",
            u.grid(),
            u.dim(),
            model.grid,
            model.spec.dim
        )));
    }
    Ok(())
}

/// Rows of `D^α u`.
pub(crate) fn frac_rows(model: &Model, u: &GridFunction) -> Result<GridFunction> {
    model.deriv.apply(u)
}

pub(crate) fn norm_powers_with(model: &Model, u: &GridFunction, du: &GridFunction) -> NormPowers {
    let p = model.spec.p as i32;
    let w = &model.weights;
    let mut frac = 0.0;
    let mut lp = 0.0;
    let mut weighted = 0.0;
    for (i, (ur, dr)) in u.rows().zip(du.rows()).enumerate() {
        let un = euclid(ur).powi(p);
        frac += w[i] * euclid(dr).powi(p);
        lp += w[i] * un;
        weighted += w[i] * model.v[i] * un;
    }
    NormPowers { frac, lp, weighted }
}

pub(crate) fn norm_powers(model: &Model, u: &GridFunction) -> Result<NormPowers> {
    check_model(model, u)?;
    let du = frac_rows(model, u)?;
    Ok(norm_powers_with(model, u, &du))
}

/// `||u||_V^p`.
pub fn v_norm_pow(model: &Model, u: &GridFunction) -> Result<f64> {
    Ok(norm_powers(model, u)?.v())
}

pub fn norm_report(model: &Model, u: &GridFunction) -> Result<NormReport> {
    let pw = norm_powers(model, u)?;
    let inv = 1.0 / model.p();
    Ok(NormReport {
        lp_norm: pw.lp.powf(inv),
        frac_seminorm: pw.frac.powf(inv),
        e_norm: (pw.frac + pw.lp).powf(inv),
        v_norm: pw.v().powf(inv),
        sup_norm: u.row_norms().into_iter().fold(0.0, f64::max),
    })
}

/// `C_p = T^α / Γ(α + 1)` in `||u||_{L^p} <= C_p ||D^α u||_{L^p}`.
pub fn poincare_constant(spec: &ProblemSpec) -> Result<f64> {
    Ok(spec.t_len.powf(spec.alpha) / gamma_fn(spec.alpha + 1.0)?)
}

/// `T^{α-1/p} / (Γ(α) (αq - q + 1)^{1/q})` in `||u||_∞ <= K ||D^α u||_{L^p}`; needs `α > 1/p`.
pub fn sup_embedding_constant(spec: &ProblemSpec) -> Result<f64> {
    let p = spec.p as f64;
    let q = spec.conjugate();
    let base = spec.alpha * q - q + 1.0;
    if !(base > 0.0) {
        return Err(Error::domain(format!(
            "sup embedding needs alpha > 1/p, got alpha = {}, p = {p}",
            spec.alpha
        )));
    }
    Ok(spec.t_len.powf(spec.alpha - 1.0 / p) / (gamma_fn(spec.alpha)? * base.powf(1.0 / q)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingVerdicts {
    /// `||u||_{L^p} <= C_p ||D^α u||_{L^p}`.
    pub lp: bool,
    /// `||u||_∞ <= K ||D^α u||_{L^p}`.
    pub sup: bool,
    /// `min(1, V_min) ||u||^p <= ||u||_V^p <= max(1, V_max) ||u||^p`.
    pub equivalence: bool,
}

impl EmbeddingVerdicts {
    pub fn all(&self) -> bool {
        self.lp && self.sup && self.equivalence
    }
}

pub fn check_embeddings(model: &Model, u: &GridFunction) -> Result<EmbeddingVerdicts> {
    let spec = &model.spec;
    let rep = norm_report(model, u)?;
    let cp = poincare_constant(spec)?;
    let k = sup_embedding_constant(spec)?;
    let (vmin, vmax) = spec.potential_bounds();
    let p = model.p();
    let e_p = rep.e_norm.powf(p);
    let v_p = rep.v_norm.powf(p);
    let slack_p = EMBEDDING_SLACK * e_p.max(v_p).max(1.0);
    Ok(EmbeddingVerdicts {
        lp: rep.lp_norm <= cp * rep.frac_seminorm + EMBEDDING_SLACK,
        sup: rep.sup_norm <= k * rep.frac_seminorm + EMBEDDING_SLACK,
        equivalence: vmin.min(1.0) * e_p <= v_p + slack_p && v_p <= vmax.max(1.0) * e_p + slack_p,
    })
}
