//! Log generating function and joint distribution by inverse DFT.
//!
//! `φ(u, v, t) = k_i ∫_0^t [M(1+U(s)) - 1] ds + n_0 ln(1+U(t)) + m_0 ln(1+V(t))`.
//! The expansion method replaces `M - 1` by its Taylor or Laurent series on each
//! domain of `[0, t]` and integrates term by term in closed form.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::burst::{BurstDist, Regime, SeriesCoefficients};
use crate::characteristics::{eval_u, eval_v, partition_domain, CharArgs, ModelParams};
use crate::error::{Error, Result};
use crate::integrals::weighted_power_integral;
use crate::quadrature;

/// Value written over non-positive probabilities before renormalising.
pub const CLAMP: f64 = 1e-300;
/// Default bound on the mass in the last row and column of the grid.
pub const DEFAULT_ALIASING_TOLERANCE: f64 = 1e-6;
/// `e^{-λ t_∞}` at the steady-state horizon.
pub const STEADY_STATE_DECAY: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Expansion,
    Quadrature,
}

/// Series orders and switching radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    pub n_t: u32,
    pub n_l: u32,
    pub alpha: f64,
    pub method: Method,
}

impl ExpansionSpec {
    /// Orders `n_t`, `n_l` with the default threshold of `dist`.
    pub fn new(n_t: u32, n_l: u32, method: Method, dist: &BurstDist) -> Result<Self> {
        let alpha = dist.default_threshold().unwrap_or(1.0);
        let spec = Self { n_t, n_l, alpha, method };
        spec.validate(dist)?;
        Ok(spec)
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self, dist: &BurstDist) -> Result<()> {
        if self.n_t == 0 {
            return Err(Error::InvalidParameter("Taylor order must be >= 1".into()));
        }
        if let Some((lo, hi)) = dist.threshold_bounds() {
            if !(self.alpha > lo && self.alpha < hi) {
                return Err(Error::InvalidParameter(format!(
                    "alpha = {} outside the convergence interval ({lo}, {hi})",
                    self.alpha
                )));
            }
        }
        Ok(())
    }
}

/// Evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSpec {
    At(f64),
    SteadyState,
}

impl TimeSpec {
    /// Finite horizon; the steady state is the transient at `t_∞`.
    pub fn horizon(&self, params: &ModelParams) -> f64 {
        match *self {
            TimeSpec::At(t) => t,
            TimeSpec::SteadyState => steady_state_horizon(params),
        }
    }
}

/// `t_∞ = -ln(1e-12) / min(β, γ)`.
pub fn steady_state_horizon(params: &ModelParams) -> f64 {
    -STEADY_STATE_DECAY.ln() / params.beta.min(params.gamma)
}

/// Grid of `N` nascent by `M` mature copy numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub m: usize,
    pub time: TimeSpec,
    /// Molecules present at `t = 0`.
    pub initial: Option<(u64, u64)>,
    /// Largest accepted mass on the last row and column; `None` disables the check.
    pub aliasing_tolerance: Option<f64>,
}

impl GridSpec {
    pub fn steady_state(n: usize, m: usize) -> Self {
        Self { n, m, time: TimeSpec::SteadyState, initial: None, aliasing_tolerance: Some(DEFAULT_ALIASING_TOLERANCE) }
    }

    pub fn at(n: usize, m: usize, t: f64) -> Self {
        Self { time: TimeSpec::At(t), ..Self::steady_state(n, m) }
    }

    pub fn with_initial(self, n0: u64, m0: u64) -> Self {
        Self { initial: Some((n0, m0)), ..self }
    }

    pub fn without_aliasing_check(self) -> Self {
        Self { aliasing_tolerance: None, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.m < 2 {
            return Err(Error::InvalidParameter(format!("grid {}x{} must be at least 2x2", self.n, self.m)));
        }
        if let TimeSpec::At(t) = self.time {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("time t = {t}")));
            }
        }
        if let Some((n0, m0)) = self.initial {
            if n0 as usize >= self.n || m0 as usize >= self.m {
                return Err(Error::InvalidParameter(format!("initial state ({n0}, {m0}) outside the grid")));
            }
        }
        Ok(())
    }
}

/// Joint distribution `P(n, m)`, row-major with `n` as the row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDist {
    pub rows: usize,
    pub cols: usize,
    pub p: Vec<f64>,
    /// `1 - Σ P` of the raw inverse DFT.
    pub mass_deficit: f64,
    /// Sum of the non-positive raw entries (a value `<= 0`).
    pub negative_mass: f64,
    /// Largest `|Im|` of the raw inverse DFT.
    pub max_imag: f64,
    /// Mass on the last row and column.
    pub boundary_mass: f64,
}

impl JointDist {
    pub fn point_mass(rows: usize, cols: usize, n: usize, m: usize) -> Self {
        let mut p = vec![0.0; rows * cols];
        p[n * cols + m] = 1.0;
        Self { rows, cols, p, mass_deficit: 0.0, negative_mass: 0.0, max_imag: 0.0, boundary_mass: 0.0 }
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.p[n * self.cols + m]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.p[n * self.cols..(n + 1) * self.cols]
    }

    /// `(E[n], E[m])`.
    pub fn means(&self) -> (f64, f64) {
        let (pn, pm) = solve_marginals(self);
        (marginal_mean(&pn), marginal_mean(&pm))
    }
}

fn marginal_mean(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(k, &q)| k as f64 * q).sum()
}

/// Precomputed series for repeated evaluation of `φ`.
#[derive(Debug, Clone)]
pub struct LogGf {
    params: ModelParams,
    spec: ExpansionSpec,
    taylor: Option<SeriesCoefficients>,
    laurent: Option<SeriesCoefficients>,
}

impl LogGf {
    pub fn new(params: &ModelParams, spec: &ExpansionSpec) -> Result<Self> {
        params.validate()?;
        spec.validate(&params.burst)?;
        let (taylor, laurent) = match spec.method {
            Method::Quadrature => (None, None),
            Method::Expansion if params.burst.is_finite_support() => {
                (Some(params.burst.taylor_coefficients(spec.n_t)?), None)
            }
            Method::Expansion => {
                (Some(params.burst.taylor_coefficients(spec.n_t)?), Some(params.burst.laurent_coefficients(spec.n_l)?))
            }
        };
        Ok(Self { params: *params, spec: *spec, taylor, laurent })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spec(&self) -> &ExpansionSpec {
        &self.spec
    }

    /// `k_i ∫_0^t [M(1+U(s)) - 1] ds`.
    pub fn production_term(&self, args: CharArgs, t: f64) -> Result<Complex64> {
        if (args.u == ZERO && args.v == ZERO) || t == 0.0 || self.params.k_i == 0.0 {
            return Ok(ZERO);
        }
        let p = &self.params;
        let integral = match self.spec.method {
            Method::Quadrature => {
                let mut failure = None;
                let breaks = quadrature::graded_breaks(0.0, t, 0.25 / p.beta.max(p.gamma));
                let value = quadrature::integrate_from(
                    |s| match p.burst.fmgf_minus_one(eval_u(s, args, p)) {
                        Ok(z) => z,
                        Err(e) => {
                            failure.get_or_insert(e);
                            ZERO
                        }
                    },
                    &breaks,
                    1e-12,
                    1e-15,
                )?;
                if let Some(e) = failure {
                    return Err(e);
                }
                value
            }
            Method::Expansion => self.expansion_integral(args, t)?,
        };
        Ok(integral * p.k_i)
    }

    fn expansion_integral(&self, args: CharArgs, t: f64) -> Result<Complex64> {
        let p = &self.params;
        let alpha = self.spec.alpha;
        let taylor = self.taylor.as_ref().ok_or_else(|| Error::InvalidParameter("missing Taylor series".into()))?;
        let partition = match &self.laurent {
            None => crate::characteristics::DomainPartition::single(t, Regime::Taylor),
            Some(_) => partition_domain(t, args, p, alpha)?,
        };
        let mut sum = ZERO;
        for (s1, s2, regime) in partition.intervals() {
            let series = match regime {
                Regime::Taylor => taylor,
                Regime::Laurent => self.laurent.as_ref().unwrap_or(taylor),
            };
            for k in 0..series.len() {
                sum += weighted_power_integral(series, k, alpha, s1, s2, args, p)?;
            }
        }
        Ok(sum)
    }

    /// `φ(u, v, t)` with initial molecules `(n_0, m_0)`.
    pub fn eval(&self, args: CharArgs, t: f64, initial: (u64, u64)) -> Result<Complex64> {
        Ok(self.production_term(args, t)? + initial_condition_term(initial.0, initial.1, args, t, &self.params)?)
    }
}

/// `φ(u, v, t)` for an empty initial state.
pub fn log_gf(args: CharArgs, t: f64, params: &ModelParams, spec: &ExpansionSpec) -> Result<Complex64> {
    LogGf::new(params, spec)?.eval(args, t, (0, 0))
}

/// `n_0 ln(1 + U(t)) + m_0 ln(1 + V(t))`.
pub fn initial_condition_term(n0: u64, m0: u64, args: CharArgs, t: f64, params: &ModelParams) -> Result<Complex64> {
    let mut out = ZERO;
    for (count, z) in [(n0, eval_u(t, args, params)), (m0, eval_v(t, args, params))] {
        if count == 0 {
            continue;
        }
        let w = 1.0 + z;
        if w == ZERO {
            return Err(Error::Singular {
                op: "initial_condition_term",
                detail: format!("characteristic reaches -1 at t = {t}"),
            });
        }
        out += w.ln() * count as f64;
    }
    Ok(out)
}

/// `e^{-2πi j/len} - 1`, for `j = 0..len`.
pub fn circle_grid(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|j| {
            let theta = -std::f64::consts::TAU * j as f64 / len as f64;
            // cos θ - 1 without cancellation near j = 0
            Complex64::new(-2.0 * (0.5 * theta).sin().powi(2), theta.sin())
        })
        .collect()
}

/// Joint distribution on `grid` by inverse DFT of `G = e^φ`.
pub fn solve_joint(params: &ModelParams, grid: &GridSpec, spec: &ExpansionSpec) -> Result<JointDist> {
    grid.validate()?;
    let gf = LogGf::new(params, spec)?;
    let t = grid.time.horizon(params);
    let (n0, m0) = grid.initial.unwrap_or((0, 0));
    if t == 0.0 {
        return Ok(JointDist::point_mass(grid.n, grid.m, n0 as usize, m0 as usize));
    }
    let us = circle_grid(grid.n);
    let vs = circle_grid(grid.m);
    let rows: Vec<Vec<Complex64>> = us
        .par_iter()
        .map(|&u| {
            vs.iter()
                .map(|&v| gf.eval(CharArgs::new(u, v), t, (n0, m0)).map(|phi| phi.exp()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values: Vec<Complex64> = rows.into_iter().flatten().collect();
    inverse_dft_2d(&mut values, grid.n, grid.m);
    finish(values, grid)
}

/// In-place unnormalised inverse DFT of a row-major `rows × cols` array.
fn inverse_dft_2d(data: &mut [Complex64], rows: usize, cols: usize) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_inverse(cols);
    row_fft.process(data);
    let col_fft = planner.plan_fft_inverse(rows);
    let mut column = vec![ZERO; rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_fft.process(&mut column);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}

fn finish(values: Vec<Complex64>, grid: &GridSpec) -> Result<JointDist> {
    let scale = 1.0 / (grid.n * grid.m) as f64;
    let mut max_imag = 0.0f64;
    let mut mass = 0.0;
    let mut negative_mass = 0.0;
    let mut p: Vec<f64> = values
        .iter()
        .map(|z| {
            let (re, im) = (z.re * scale, z.im * scale);
            max_imag = max_imag.max(im.abs());
            mass += re;
            if re <= 0.0 {
                negative_mass += re;
                CLAMP
            } else {
                re
            }
        })
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|q| *q /= total);
    let (rows, cols) = (grid.n, grid.m);
    let last_row: f64 = p[(rows - 1) * cols..].iter().sum();
    let last_col: f64 = (0..rows - 1).map(|r| p[r * cols + cols - 1]).sum();
    let boundary_mass = last_row + last_col;
    if let Some(tol) = grid.aliasing_tolerance {
        if boundary_mass > tol {
            return Err(Error::Aliasing { boundary_mass, tolerance: tol });
        }
    }
    Ok(JointDist { rows, cols, p, mass_deficit: 1.0 - mass, negative_mass, max_imag, boundary_mass })
}

/// Nascent and mature marginals.
pub fn solve_marginals(dist: &JointDist) -> (Vec<f64>, Vec<f64>) {
    let mut nascent = vec![0.0; dist.rows];
    let mut mature = vec![0.0; dist.cols];
    for (n, total) in nascent.iter_mut().enumerate() {
        for (m, &q) in dist.row(n).iter().enumerate() {
            *total += q;
            mature[m] += q;
        }
    }
    (nascent, mature)
}
