//! Post-hoc checks of the a priori bounds and the mountain-pass geometry on computed solutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{
    c_lambda_upper_from, compute_lambdas, d_lambda, nu_lambda, sup_bound, vnorm_pow_bound,
    ConstantsReport, LogReal,
};
use crate::energy::energy;
use crate::error::Result;
use crate::grid_frac::GridFunction;
use crate::problem::{Model, ProblemSpec};
use crate::solver::{path_endpoint, SolveResult, SweepEntry};
use crate::spaces::v_norm_pow;

/// Relative window around a threshold inside which strict inequalities are not decided.
pub const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Too little data, or a value sitting on a threshold.
    Inconclusive,
    /// Measured only: the bound is not guaranteed for these parameters.
    NotAsserted,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// True unless the check was asserted and failed.
    pub fn acceptable(&self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

/// `value <= bound`, with `margin = (bound - value) / bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl BoundCheck {
    fn upper(value: f64, bound: LogReal, slack: f64, asserted: bool) -> Self {
        let b = bound.to_f64();
        let ok = LogReal::from_f64(value) <= bound * LogReal::from_f64(1.0 + slack);
        Self {
            value,
            bound: b,
            margin: (b - value) / b,
            verdict: if asserted {
                Verdict::from_bool(ok)
            } else {
                Verdict::NotAsserted
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdicts {
    /// `||u_λ||_V^p` against its decaying a priori bound.
    pub vnorm: BoundCheck,
    /// `||u_λ||_∞` against `δ/2`; asserted only for `λ > Λ3`.
    pub sup_half_delta: BoundCheck,
    /// `||u_λ||_∞` against `K (vnorm bound)^{1/p}`.
    pub sup_a_priori: BoundCheck,
    /// `||u_λ||_∞` against `K ||u_λ||_V` for the computed `u_λ`; a discretization consistency check.
    pub sup_embedding: BoundCheck,
    /// `c_λ <= C* λ^{-(p-1)/(q1-p)}`; asserted only for `λ >= max(Λ1, Λ2)`.
    pub c_upper: BoundCheck,
    /// `c_λ >= d_λ`, reported as `d_λ (1 - slack) <= c_λ`.
    pub c_lower: BoundCheck,
    pub geometry: Verdict,
    /// Filled in at sweep level by [`check_decay`].
    pub decay: Option<Verdict>,
    /// `u_λ` vanishes on the grid.
    pub trivial: bool,
}

impl BoundVerdicts {
    /// Every asserted verdict passed and the solution is nontrivial.
    pub fn all_ok(&self) -> bool {
        !self.trivial
            && [
                self.vnorm.verdict,
                self.sup_half_delta.verdict,
                self.sup_a_priori.verdict,
                self.sup_embedding.verdict,
                self.c_upper.verdict,
                self.c_lower.verdict,
                self.geometry,
            ]
            .iter()
            .all(Verdict::acceptable)
            && self.decay.is_none_or(|d| d.acceptable())
    }
}

pub fn check_bounds(
    result: &SolveResult,
    spec: &ProblemSpec,
    rep: &ConstantsReport,
    slack: f64,
) -> Result<BoundVerdicts> {
    let lambda = LogReal::from_log10(result.lambda_log10);
    let p = spec.p;
    let pf = p as f64;
    let vp = result.norms.v_norm.powf(pf);
    let half_delta = LogReal::from_f64(0.5 * spec.growth().delta);
    let above_l3 = lambda > rep.lambda3;
    let level = c_lambda_upper_from(rep, lambda);

    let c_lower_bound = result.d * (1.0 - slack);
    let c_lower_ok = result.c_lambda >= c_lower_bound;
    Ok(BoundVerdicts {
        vnorm: BoundCheck::upper(vp, vnorm_pow_bound(rep, lambda), slack, true),
        sup_half_delta: BoundCheck::upper(result.norms.sup_norm, half_delta, slack, above_l3),
        sup_a_priori: BoundCheck::upper(
            result.norms.sup_norm,
            sup_bound(rep, p, lambda),
            slack,
            true,
        ),
        sup_embedding: BoundCheck::upper(
            result.norms.sup_norm,
            rep.sup_coeff * LogReal::from_f64(result.norms.v_norm),
            slack,
            result.norms.v_norm > 0.0,
        ),
        c_upper: BoundCheck::upper(result.c_lambda, level.value, slack, level.hypothesis_met),
        c_lower: BoundCheck {
            value: result.c_lambda,
            bound: c_lower_bound,
            margin: (result.c_lambda - c_lower_bound) / c_lower_bound,
            verdict: Verdict::from_bool(c_lower_ok),
        },
        geometry: Verdict::from_bool(result.geometry_ok),
        decay: None,
        trivial: result.u.is_zero(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryVerdict {
    /// `min Ī_λ / d_λ` over the sampled ring `||u||_V = ν_λ`.
    pub ring_min_ratio: f64,
    pub ring: Verdict,
    pub endpoint_energy: f64,
    pub endpoint: Verdict,
    pub samples: usize,
}

impl GeometryVerdict {
    pub fn ok(&self) -> bool {
        self.ring.acceptable() && self.endpoint.acceptable()
    }
}

/// Samples the ring `||u||_V = ν_λ` and evaluates the path endpoint.
pub fn check_geometry(
    spec: &ProblemSpec,
    lambda: f64,
    samples: usize,
    grid_m: usize,
    seed: u64,
    slack: f64,
) -> Result<GeometryVerdict> {
    let model = Model::new(spec.clone(), grid_m)?;
    let rep = compute_lambdas(spec)?;
    let nu = nu_lambda(spec, lambda)?;
    let d = d_lambda(spec, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let u = random_element(&model, &mut rng);
        let s = v_norm_pow(&model, &u)?;
        let u = u.scaled(nu / s.powf(1.0 / model.p()));
        worst = worst.min(energy(&model, &u, lambda, true)?.total / d);
    }
    let end = path_endpoint(&model)?;
    let endpoint_energy = energy(&model, &end, lambda, true)?.total;
    let ratio = (LogReal::from_f64(lambda) / rep.lambda1).to_f64();
    let endpoint = if (ratio - 1.0).abs() <= THRESHOLD_TOL {
        Verdict::Inconclusive
    } else if ratio > 1.0 {
        Verdict::from_bool(endpoint_energy < 0.0)
    } else {
        Verdict::NotAsserted
    };
    Ok(GeometryVerdict {
        ring_min_ratio: worst,
        ring: if samples == 0 {
            Verdict::Inconclusive
        } else {
            Verdict::from_bool(worst >= 1.0 - slack)
        },
        endpoint_energy,
        endpoint,
        samples,
    })
}

/// Random band-limited element with random components, vanishing at both ends.
fn random_element(model: &Model, rng: &mut ChaCha8Rng) -> GridFunction {
    let dim = model.spec.dim;
    let modes = rng.random_range(1..10usize);
    let coeffs: Vec<f64> = (0..dim * modes)
        .map(|j| (rng.random::<f64>() * 2.0 - 1.0) / (1 + j % modes) as f64)
        .collect();
    let t_len = model.grid.len();
    let pi = std::f64::consts::PI;
    GridFunction::dirichlet_from_fn(model.grid, dim, |t, out| {
        for (c, o) in out.iter_mut().enumerate() {
            *o = (0..modes)
                .map(|j| coeffs[c * modes + j] * ((j + 1) as f64 * pi * t / t_len).sin())
                .sum();
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayVerdict {
    pub verdict: Verdict,
    pub below_bound_line: bool,
    pub vnorm_decreased: bool,
    pub sup_decreased: bool,
    pub reason: String,
}

/// Checks that every point lies under the bound line and both norms shrink from first to last.
pub fn check_decay(table: &[SweepEntry]) -> DecayVerdict {
    let ok: Vec<&SweepEntry> = table.iter().filter(|e| e.is_ok()).collect();
    let span = match (ok.first(), ok.last()) {
        (Some(a), Some(b)) => b.lambda_log10 - a.lambda_log10,
        _ => 0.0,
    };
    if ok.len() < 3 || span < 2.0 {
        return DecayVerdict {
            verdict: Verdict::Inconclusive,
            below_bound_line: false,
            vnorm_decreased: false,
            sup_decreased: false,
            reason: format!(
                "need >= 3 successful entries spanning >= 2 decades, got {} spanning {span}",
                ok.len()
            ),
        };
    }
    let below = ok.iter().all(|e| e.margin > 0.0);
    let (first, last) = (ok[0], ok[ok.len() - 1]);
    let vdec = last.vnorm < first.vnorm;
    let sdec = last.supnorm < first.supnorm;
    let pass = below && vdec && sdec;
    DecayVerdict {
        verdict: Verdict::from_bool(pass),
        below_bound_line: below,
        vnorm_decreased: vdec,
        sup_decreased: sdec,
        reason: if pass {
            "all points below the bound line; both norms decrease".into()
        } else {
            format!("below line: {below}, V-norm decreased: {vdec}, sup-norm decreased: {sdec}")
        },
    }
}
