//! Characteristic curves `U(s)`, `V(s)` and the Taylor/Laurent partition of `[0, t]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::burst::{BurstDist, Regime};
use crate::error::{Error, Result};

/// Relative gap `|β - γ| / max(β, γ)` below which the degenerate formulas are used.
pub const DEGENERACY_EPS: f64 = 1e-6;

const NEWTON_STEPS: usize = 20;

/// Kinetic rates and burst law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Burst frequency.
    pub k_i: f64,
    /// Splicing rate.
    pub beta: f64,
    /// Degradation rate of the mature transcript.
    pub gamma: f64,
    pub burst: BurstDist,
}

impl ModelParams {
    pub fn new(k_i: f64, beta: f64, gamma: f64, burst: BurstDist) -> Result<Self> {
        let p = Self { k_i, beta, gamma, burst };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_i.is_finite() && self.k_i >= 0.0) {
            return Err(Error::InvalidParameter(format!("k_i = {}", self.k_i)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0 && self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {}, gamma = {}", self.beta, self.gamma)));
        }
        self.burst.validate()
    }

    pub fn is_degenerate(&self) -> bool {
        (self.beta - self.gamma).abs() <= DEGENERACY_EPS * self.beta.max(self.gamma)
    }

    /// `f = β / (β - γ)`.
    pub fn f(&self) -> f64 {
        self.beta / (self.beta - self.gamma)
    }
}

/// Generating-function arguments `u = x - 1`, `v = y - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharArgs {
    pub u: Complex64,
    pub v: Complex64,
}

impl CharArgs {
    pub fn new(u: Complex64, v: Complex64) -> Self {
        Self { u, v }
    }
}

/// `U(s)`.
pub fn eval_u(s: f64, args: CharArgs, params: &ModelParams) -> Complex64 {
    let CharArgs { u, v } = args;
    let g = params.gamma;
    if params.is_degenerate() {
        (u + v * (g * s)) * (-g * s).exp()
    } else {
        let vf = v * params.f();
        vf * (-g * s).exp() + (u - vf) * (-params.beta * s).exp()
    }
}

/// `dU/ds`.
pub fn eval_du(s: f64, args: CharArgs, params: &ModelParams) -> Complex64 {
    let CharArgs { u, v } = args;
    let g = params.gamma;
    if params.is_degenerate() {
        (v * g - (u + v * (g * s)) * g) * (-g * s).exp()
    } else {
        let vf = v * params.f();
        let b = params.beta;
        -vf * g * (-g * s).exp() - (u - vf) * b * (-b * s).exp()
    }
}

/// `V(s) = v e^{-γ s}`.
pub fn eval_v(s: f64, args: CharArgs, params: &ModelParams) -> Complex64 {
    args.v * (-params.gamma * s).exp()
}

/// Positive stationary points of `|U(s)|²`, sorted.
pub fn extrema_of_abs_u(args: CharArgs, params: &ModelParams) -> Vec<f64> {
    let CharArgs { u, v } = args;
    let g = params.gamma;
    let mut out: Vec<f64> = if params.is_degenerate() {
        let re = (u * v.conj()).re;
        let a = -g * g * v.norm_sqr();
        let b = g * (v.norm_sqr() - 2.0 * re);
        let c = re - u.norm_sqr();
        real_roots(a, b, c).into_iter().collect()
    } else {
        let f = params.f();
        let beta = params.beta;
        let vf = v * f;
        let bb = u - vf;
        // roots in z = e^{(γ-β)s}
        let a = -2.0 * beta * bb.norm_sqr();
        let b = -2.0 * (g + beta) * (vf * bb.conj()).re;
        let c = -2.0 * g * vf.norm_sqr();
        real_roots(a, b, c).into_iter().filter(|&z| z > 0.0).map(|z| z.ln() / (g - beta)).collect()
    };
    out.retain(|&s| s > 0.0 && s.is_finite());
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Real roots of `a x² + b x + c`.
fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Ordered sub-intervals of `[0, t]`, each tagged with the series used on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPartition {
    pub boundaries: Vec<f64>,
    pub regimes: Vec<Regime>,
}

impl DomainPartition {
    pub fn single(t: f64, regime: Regime) -> Self {
        Self { boundaries: vec![0.0, t], regimes: vec![regime] }
    }

    pub fn len(&self) -> usize {
        self.regimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regimes.is_empty()
    }

    /// `(s1, s2, regime)` for each sub-interval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, Regime)> + '_ {
        self.boundaries.windows(2).zip(&self.regimes).map(|(w, &r)| (w[0], w[1], r))
    }
}

/// Split `[0, t]` where `|U(s)|` crosses `alpha`.
pub fn partition_domain(t: f64, args: CharArgs, params: &ModelParams, alpha: f64) -> Result<DomainPartition> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("partition horizon t = {t}")));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("threshold alpha = {alpha}")));
    }
    let a2 = alpha * alpha;
    let g = |s: f64| eval_u(s, args, params).norm_sqr() - a2;
    let dg = |s: f64| 2.0 * (eval_u(s, args, params).conj() * eval_du(s, args, params)).re;

    let mut knots = vec![0.0];
    knots.extend(extrema_of_abs_u(args, params).into_iter().filter(|&s| s < t));
    knots.push(t);

    let mut cuts = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (glo, ghi) = (g(lo), g(hi));
        if glo == 0.0 || glo.signum() == ghi.signum() {
            continue;
        }
        let s = crossing(&g, &dg, lo, hi, glo, a2)?;
        if s > 0.0 && s < t {
            cuts.push(s);
        }
    }

    let mut boundaries = vec![0.0];
    let mut regimes: Vec<Regime> = Vec::new();
    let mut edges = cuts.clone();
    edges.push(t);
    let mut left = 0.0;
    for right in edges {
        if right <= left {
            continue;
        }
        let mid = 0.5 * (left + right);
        let regime = if eval_u(mid, args, params).norm() > alpha { Regime::Laurent } else { Regime::Taylor };
        if regimes.last() == Some(&regime) {
            *boundaries.last_mut().unwrap() = right;
        } else {
            regimes.push(regime);
            boundaries.push(right);
        }
        left = right;
    }
    Ok(DomainPartition { boundaries, regimes })
}

/// Root of `g` in `[lo, hi]` given a sign change: Newton steps kept inside the
/// bracket, bisection whenever a step leaves it.
fn crossing(
    g: &impl Fn(f64) -> f64,
    dg: &impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    glo: f64,
    a2: f64,
) -> Result<f64> {
    let rising = glo < 0.0;
    let mut s = 0.5 * (lo + hi);
    for step in 0..NEWTON_STEPS + 200 {
        let gs = g(s);
        if gs.abs() < 1e-12 * a2 {
            return Ok(s);
        }
        if (gs < 0.0) == rising {
            lo = s;
        } else {
            hi = s;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1e-300) {
            return Ok(0.5 * (lo + hi));
        }
        let d = dg(s);
        let newton = s - gs / d;
        s = if step < NEWTON_STEPS && d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    Err(Error::Convergence { op: "partition_domain", detail: format!("crossing in [{lo}, {hi}]") })
}
