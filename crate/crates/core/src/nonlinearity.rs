//! The nonlinearity `F`, the cut-off `m` and the globally defined extension `F̄`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_frac::euclid;

/// Relative slack when comparing two sides of an inequality that may hold with equality.
pub const GROWTH_REL_TOL: f64 = 1e-12;

/// Declared constants of the growth hypotheses on `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthConstants {
    pub delta: f64,
    pub q1: f64,
    pub q2: f64,
    pub m1: f64,
    pub m2: f64,
    pub beta: f64,
}

impl GrowthConstants {
    /// `theta = min(beta, q2)`.
    pub fn theta(&self) -> f64 {
        self.beta.min(self.q2)
    }
}

/// `(a0, b)` with `b` a function of `t`.
pub type Envelope<'a> = (f64, Box<dyn Fn(f64) -> f64 + 'a>);

/// A nonlinearity `F(t, x)`, valid for `|x| <= delta`, with its declared constants.
pub trait Nonlinearity: Send + Sync {
    fn eval(&self, t: f64, x: &[f64]) -> f64;

    /// Writes `∇_x F(t, x)` into `out`.
    fn grad(&self, t: f64, x: &[f64], out: &mut [f64]);

    fn constants(&self) -> GrowthConstants;

    /// Envelope `(a0, b)` with `|F|, |∇F| <= a0 b(t)` on `|x| <= delta`, if known.
    fn envelope(&self) -> Option<Envelope<'_>> {
        None
    }
}

/// `F(t, x) = (c0 + c1 t) |x|^r` with user-declared growth constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerFamily {
    pub c0: f64,
    pub c1: f64,
    pub r: f64,
    pub delta: f64,
    pub q1: f64,
    pub q2: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    pub beta: f64,
}

impl PowerFamily {
    /// Requires `c0 + c1 t > 0` on `[0, t_len]` and `r > 1`.
    pub fn validate(&self, t_len: f64) -> Result<()> {
        if !(self.c0 > 0.0 && self.c0 + self.c1 * t_len > 0.0) {
            return Err(Error::hypothesis(
                "power nonlinearity requires c0 + c1 t > 0 on [0, T]",
            ));
        }
        if !(self.r > 1.0) {
            return Err(Error::hypothesis("power nonlinearity requires r > 1"));
        }
        Ok(())
    }

    fn weight(&self, t: f64) -> f64 {
        self.c0 + self.c1 * t
    }
}

impl Nonlinearity for PowerFamily {
    fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.weight(t) * euclid(x).powf(self.r)
    }

    fn grad(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let n = euclid(x);
        if n == 0.0 {
            out.fill(0.0);
            return;
        }
        let c = self.r * self.weight(t) * n.powf(self.r - 2.0);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = c * xi;
        }
    }

    fn constants(&self) -> GrowthConstants {
        GrowthConstants {
            delta: self.delta,
            q1: self.q1,
            q2: self.q2,
            m1: self.m1,
            m2: self.m2,
            beta: self.beta,
        }
    }

    /// `a(s) = s^{r-1}(1 + s)`, `b(t) = r (c0 + c1 t)`.
    fn envelope(&self) -> Option<Envelope<'_>> {
        let a0 = self.delta.powf(self.r - 1.0) * (1.0 + self.delta);
        Some((a0, Box::new(move |t| self.r * self.weight(t).abs())))
    }
}

/// Even C¹ cut-off: 1 on `|s| <= δ/2`, 0 on `|s| >= δ`, cubic blend between.
pub fn cutoff(s: f64, delta: f64) -> f64 {
    let w = (2.0 * s.abs() / delta - 1.0).clamp(0.0, 1.0);
    1.0 - w * w * (3.0 - 2.0 * w)
}

/// Derivative of [`cutoff`]; `s * cutoff_derivative(s) <= 0`, `max |m'| = 3/δ`.
pub fn cutoff_derivative(s: f64, delta: f64) -> f64 {
    let w = (2.0 * s.abs() / delta - 1.0).clamp(0.0, 1.0);
    -12.0 * w * (1.0 - w) / delta * s.signum()
}

/// `F̄ = m(|x|) F + (1 - m(|x|)) M2 |x|^q2`; equals `F` bitwise for `|x| <= δ/2`.
pub fn f_bar(t: f64, x: &[f64], nl: &dyn Nonlinearity) -> f64 {
    let g = nl.constants();
    let n = euclid(x);
    if n <= 0.5 * g.delta {
        return nl.eval(t, x);
    }
    let tail = g.m2 * n.powf(g.q2);
    if n >= g.delta {
        return tail;
    }
    let m = cutoff(n, g.delta);
    m * nl.eval(t, x) + (1.0 - m) * tail
}

/// `∇_x F̄(t, x)` written into `out`; zero at `x = 0`.
pub fn grad_f_bar(t: f64, x: &[f64], nl: &dyn Nonlinearity, out: &mut [f64]) {
    let g = nl.constants();
    let n = euclid(x);
    if n == 0.0 {
        out.fill(0.0);
        return;
    }
    if n <= 0.5 * g.delta {
        nl.grad(t, x, out);
        return;
    }
    let tail_coef = g.q2 * g.m2 * n.powf(g.q2 - 2.0);
    if n >= g.delta {
        for (o, xi) in out.iter_mut().zip(x) {
            *o = tail_coef * xi;
        }
        return;
    }
    let m = cutoff(n, g.delta);
    let dm = cutoff_derivative(n, g.delta);
    let f = nl.eval(t, x);
    let tail = g.m2 * n.powf(g.q2);
    nl.grad(t, x, out);
    let radial = dm * (f - tail) / n;
    for (o, xi) in out.iter_mut().zip(x) {
        *o = m * *o + radial * xi + (1.0 - m) * tail_coef * xi;
    }
}

/// Result of sampling one inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub pass: bool,
    pub samples: usize,
    pub violations: usize,
    /// Largest `(lhs - rhs) / max(|lhs|, |rhs|)` seen; negative when every sample holds strictly.
    pub worst: f64,
}

impl ConditionVerdict {
    fn new() -> Self {
        Self {
            pass: true,
            samples: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    /// Records `lhs <= rhs`.
    fn record(&mut self, lhs: f64, rhs: f64) {
        self.samples += 1;
        let scale = lhs.abs().max(rhs.abs());
        let rel = if scale == 0.0 {
            0.0
        } else {
            (lhs - rhs) / scale
        };
        if rel.is_nan() {
            self.violations += 1;
            self.pass = false;
            self.worst = f64::INFINITY;
            return;
        }
        self.worst = self.worst.max(rel);
        if rel > GROWTH_REL_TOL {
            self.violations += 1;
            self.pass = false;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `M1 |x|^q1 <= F` on `|x| <= δ`.
    pub lower_growth: ConditionVerdict,
    /// `F <= M2 |x|^q2` on `|x| <= δ`.
    pub upper_growth: ConditionVerdict,
    /// `0 <= β F <= (∇F, x)` on `|x| <= δ`.
    pub superlinearity: ConditionVerdict,
    /// `0 <= F̄ <= M2 |x|^q2` on `|x| <= 3δ`.
    pub extended_growth: ConditionVerdict,
    /// `θ F̄ <= (∇F̄, x)` on `0 < |x| <= 3δ`.
    pub extended_superlinearity: ConditionVerdict,
    /// `|F̄| <= a0 b + M2|x|^q2` and `|∇F̄| <= (1+m0) a0 b + M2 q2 |x|^{q2-1} + m0 M2 |x|^q2`;
    /// `None` when the nonlinearity has no known envelope.
    pub extended_envelope: Option<ConditionVerdict>,
}

impl GrowthReport {
    pub fn all_pass(&self) -> bool {
        self.lower_growth.pass
            && self.upper_growth.pass
            && self.superlinearity.pass
            && self.extended_growth.pass
            && self.extended_superlinearity.pass
            && self.extended_envelope.is_none_or(|v| v.pass)
    }
}

/// Samples `(t, x)` with `t ∈ [0, t_len]`, `x ∈ R^dim` and checks every growth inequality.
///
/// Half of the radii are uniform and half log-uniform; the knots `0, δ/2, δ, 3δ`
/// and both interval ends are always included.
pub fn check_growth(
    nl: &dyn Nonlinearity,
    t_len: f64,
    dim: usize,
    samples: usize,
    seed: u64,
) -> GrowthReport {
    let g = nl.constants();
    let theta = g.theta();
    let m0 = 3.0 / g.delta;
    let envelope = nl.envelope();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut lower = ConditionVerdict::new();
    let mut upper = ConditionVerdict::new();
    let mut superlin = ConditionVerdict::new();
    let mut ext_growth = ConditionVerdict::new();
    let mut ext_super = ConditionVerdict::new();
    let mut ext_env = envelope.as_ref().map(|_| ConditionVerdict::new());

    let mut x = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut check = |t: f64, x: &[f64]| {
        let n = euclid(x);
        if n <= g.delta {
            let f = nl.eval(t, x);
            nl.grad(t, x, &mut grad);
            let fx: f64 = grad.iter().zip(x).map(|(a, b)| a * b).sum();
            lower.record(g.m1 * n.powf(g.q1), f);
            upper.record(f, g.m2 * n.powf(g.q2));
            superlin.record(0.0, g.beta * f);
            superlin.record(g.beta * f, fx);
        }
        let fb = f_bar(t, x, nl);
        grad_f_bar(t, x, nl, &mut grad);
        let fbx: f64 = grad.iter().zip(x).map(|(a, b)| a * b).sum();
        ext_growth.record(0.0, fb);
        ext_growth.record(fb, g.m2 * n.powf(g.q2));
        if n > 0.0 {
            ext_super.record(theta * fb, fbx);
        }
        if let (Some(v), Some((a0, b))) = (ext_env.as_mut(), envelope.as_ref()) {
            let ab = a0 * b(t);
            v.record(fb.abs(), ab + g.m2 * n.powf(g.q2));
            v.record(
                euclid(&grad),
                (1.0 + m0) * ab + g.m2 * g.q2 * n.powf(g.q2 - 1.0) + m0 * g.m2 * n.powf(g.q2),
            );
        }
    };

    let knots = [0.0, 0.5 * g.delta, g.delta, 3.0 * g.delta];
    for &t in &[0.0, t_len] {
        for &r in &knots {
            x.fill(0.0);
            x[0] = r;
            check(t, &x);
        }
    }
    for k in 0..samples {
        let t = rng.random::<f64>() * t_len;
        let wide = k % 4 >= 2;
        let rmax = if wide { 3.0 * g.delta } else { g.delta };
        let r = if k % 2 == 0 {
            rng.random::<f64>() * rmax
        } else {
            rmax * 10f64.powf(-8.0 * rng.random::<f64>())
        };
        for xi in x.iter_mut() {
            *xi = rng.random::<f64>() * 2.0 - 1.0;
        }
        let n = euclid(&x);
        if n == 0.0 {
            continue;
        }
        for xi in x.iter_mut() {
            *xi *= r / n;
        }
        check(t, &x);
    }

    GrowthReport {
        lower_growth: lower,
        upper_growth: upper,
        superlinearity: superlin,
        extended_growth: ext_growth,
        extended_superlinearity: ext_super,
        extended_envelope: ext_env,
    }
}
