//! Divergences between data and model distributions and parameter landscapes.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::burst::BurstDist;
use crate::characteristics::{CharArgs, ModelParams};
use crate::error::{Error, Result};
use crate::solver::{circle_grid, solve_joint, ExpansionSpec, GridSpec, JointDist, LogGf, Method, TimeSpec, CLAMP};

/// Largest out-of-grid data mass accepted by the divergences.
pub const MAX_OUT_OF_GRID: f64 = 1e-3;

/// Empirical joint PMF truncated to a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataHist {
    pub rows: usize,
    pub cols: usize,
    /// Renormalised over the grid.
    pub q: Vec<f64>,
    pub out_of_grid: f64,
    pub samples: usize,
}

impl DataHist {
    pub fn from_counts(counts: &[(u64, u64)], rows: usize, cols: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParameter("empty data set".into()));
        }
        let (mut q, out_of_grid) = crate::ssa::histogram(counts, rows, cols);
        if out_of_grid > MAX_OUT_OF_GRID {
            return Err(Error::Support { out_of_grid });
        }
        let total: f64 = q.iter().sum();
        q.iter_mut().for_each(|x| *x /= total);
        Ok(Self { rows, cols, q, out_of_grid, samples: counts.len() })
    }

    pub fn from_pmf(q: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if q.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} grid", q.len())));
        }
        Ok(Self { rows, cols, q, out_of_grid: 0.0, samples: 0 })
    }
}

fn same_shape(rows: usize, cols: usize, d: &JointDist) -> Result<()> {
    if rows == d.rows && cols == d.cols {
        Ok(())
    } else {
        Err(Error::Shape(format!("{rows}x{cols} against {}x{}", d.rows, d.cols)))
    }
}

/// `Σ q ln(q / p)` over the data support.
pub fn kl_divergence(data: &DataHist, model: &JointDist) -> Result<f64> {
    same_shape(data.rows, data.cols, model)?;
    let kl =
        data.q.iter().zip(&model.p).filter(|(&q, _)| q > 0.0).map(|(&q, &p)| q * (q / p.max(CLAMP)).ln()).sum::<f64>();
    Ok(kl.max(0.0))
}

/// Largest CDF gap with states ordered row-major (`n` outer, `m` inner).
pub fn ks_error(p1: &JointDist, p2: &JointDist) -> Result<f64> {
    same_shape(p1.rows, p1.cols, p2)?;
    let mut c1 = 0.0;
    let mut c2 = 0.0;
    let mut worst = 0.0f64;
    for (a, b) in p1.p.iter().zip(&p2.p) {
        c1 += a;
        c2 += b;
        worst = worst.max((c1 - c2).abs());
    }
    Ok(worst.min(1.0))
}

/// Larger of the KS distances between the nascent and between the mature marginals.
pub fn ks_marginal_error(p1: &JointDist, p2: &JointDist) -> Result<f64> {
    same_shape(p1.rows, p1.cols, p2)?;
    let (n1, m1) = crate::solver::solve_marginals(p1);
    let (n2, m2) = crate::solver::solve_marginals(p2);
    let ks = |a: &[f64], b: &[f64]| {
        let (mut c1, mut c2, mut worst) = (0.0, 0.0, 0.0f64);
        for (x, y) in a.iter().zip(b) {
            c1 += x;
            c2 += y;
            worst = worst.max((c1 - c2).abs());
        }
        worst
    };
    Ok(ks(&n1, &n2).max(ks(&m1, &m2)).min(1.0))
}

/// Total variation distance `½ Σ |p - q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Empirical characteristic function on the unit-circle grid.
#[derive(Debug, Clone)]
pub struct EmpiricalCf {
    rows: usize,
    cols: usize,
    values: Vec<Complex64>,
}

impl EmpiricalCf {
    /// `Σ q(n, m) x_j^n y_k^m` with `x_j = e^{-2πij/N}`, by one forward 2-D FFT.
    pub fn new(data: &DataHist) -> Self {
        let (rows, cols) = (data.rows, data.cols);
        let mut values: Vec<Complex64> = data.q.iter().map(|&q| Complex64::new(q, 0.0)).collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(cols).process(&mut values);
        let col_fft = planner.plan_fft_forward(rows);
        let mut column = vec![Complex64::new(0.0, 0.0); rows];
        for c in 0..cols {
            for r in 0..rows {
                column[r] = values[r * cols + c];
            }
            col_fft.process(&mut column);
            for r in 0..rows {
                values[r * cols + c] = column[r];
            }
        }
        Self { rows, cols, values }
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * self.cols + k]
    }
}

/// Mean of `|Ĝ_data - e^φ|²` over the grid.
pub fn cf_distance(data: &EmpiricalCf, params: &ModelParams, spec: &ExpansionSpec, time: TimeSpec) -> Result<f64> {
    let gf = LogGf::new(params, spec)?;
    let t = time.horizon(params);
    let us = circle_grid(data.rows);
    let vs = circle_grid(data.cols);
    let total = us
        .par_iter()
        .enumerate()
        .map(|(j, &u)| {
            vs.iter().enumerate().try_fold(0.0, |acc, (k, &v)| {
                let g = gf.eval(CharArgs::new(u, v), t, (0, 0))?.exp();
                Ok(acc + (data.get(j, k) - g).norm_sqr())
            })
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum::<f64>();
    Ok(total / (data.rows * data.cols) as f64)
}

/// Unbounded burst laws parametrised by their mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstKind {
    Geometric,
    ShiftedGeometric,
}

impl BurstKind {
    pub fn with_mean(self, b: f64) -> BurstDist {
        match self {
            BurstKind::Geometric => BurstDist::Geometric { b },
            BurstKind::ShiftedGeometric => BurstDist::ShiftedGeometric { b },
        }
    }
}

/// Trial `(k_i, b)` values with fixed rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub k_axis: Vec<f64>,
    pub b_axis: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub kind: BurstKind,
}

/// `len` points evenly spaced in `log10` between `lo` and `hi`.
pub fn log_axis(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![10f64.powf(lo)];
    }
    (0..len).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (len - 1) as f64)).collect()
}

impl ParamGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("k", &self.k_axis), ("b", &self.b_axis)] {
            if axis.is_empty() || axis.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
                return Err(Error::InvalidParameter(format!("{name} axis must be non-empty and strictly increasing")));
            }
        }
        Ok(())
    }

    pub fn params(&self, ib: usize, ik: usize) -> Result<ModelParams> {
        ModelParams::new(self.k_axis[ik], self.beta, self.gamma, self.kind.with_mean(self.b_axis[ib]))
    }

    /// Index of the axis value closest to `x` in log scale.
    pub fn nearest(axis: &[f64], x: f64) -> usize {
        let mut best = 0;
        for (i, a) in axis.iter().enumerate() {
            if (a.ln() - x.ln()).abs() < (axis[best].ln() - x.ln()).abs() {
                best = i;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    Kl,
    Cf,
}

/// Per-sweep solver settings; the threshold follows each cell's burst law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub n_t: u32,
    pub n_l: u32,
    pub method: Method,
    pub divergence: Divergence,
    pub time: TimeSpec,
}

/// Divergence over a [`ParamGrid`]; `values[ib * k_len + ik]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub b_len: usize,
    pub k_len: usize,
    pub values: Vec<f64>,
    /// Error message for cells that could not be evaluated.
    pub flags: Vec<Option<String>>,
    pub negative_mass: Vec<f64>,
    pub seconds: Vec<f64>,
    pub method: Method,
    pub divergence: Divergence,
}

impl Landscape {
    pub fn get(&self, ib: usize, ik: usize) -> f64 {
        self.values[ib * self.k_len + ik]
    }

    /// `(ib, ik)` of the smallest finite value.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| (i / self.k_len, i % self.k_len))
    }

    /// Largest minus smallest finite value.
    pub fn range(&self) -> f64 {
        let finite = self.values.iter().copied().filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    /// Median per-cell time in seconds.
    pub fn median_seconds(&self) -> f64 {
        percentile(&self.seconds, 0.5)
    }
}

/// `q`-quantile by nearest rank.
pub fn percentile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let idx = ((q * (v.len() - 1) as f64).round() as usize).min(v.len() - 1);
    v[idx]
}

/// Evaluate the divergence of `data` from every cell of `grid`.
pub fn sweep(data: &DataHist, grid: &ParamGrid, settings: &SweepSettings) -> Result<Landscape> {
    grid.validate()?;
    let (b_len, k_len) = (grid.b_axis.len(), grid.k_axis.len());
    let cf = (settings.divergence == Divergence::Cf).then(|| EmpiricalCf::new(data));
    let cells: Vec<(f64, Option<String>, f64, f64)> = (0..b_len * k_len)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let result = evaluate_cell(data, cf.as_ref(), grid, settings, i / k_len, i % k_len);
            let seconds = start.elapsed().as_secs_f64();
            match result {
                Ok((value, negative)) => (value, None, negative, seconds),
                Err(e) => (f64::NAN, Some(e.to_string()), f64::NAN, seconds),
            }
        })
        .collect();
    let mut out = Landscape {
        b_len,
        k_len,
        values: Vec::with_capacity(cells.len()),
        flags: Vec::with_capacity(cells.len()),
        negative_mass: Vec::with_capacity(cells.len()),
        seconds: Vec::with_capacity(cells.len()),
        method: settings.method,
        divergence: settings.divergence,
    };
    for (v, f, n, s) in cells {
        out.values.push(v);
        out.flags.push(f);
        out.negative_mass.push(n);
        out.seconds.push(s);
    }
    Ok(out)
}

fn evaluate_cell(
    data: &DataHist,
    cf: Option<&EmpiricalCf>,
    grid: &ParamGrid,
    settings: &SweepSettings,
    ib: usize,
    ik: usize,
) -> Result<(f64, f64)> {
    let params = grid.params(ib, ik)?;
    let spec = ExpansionSpec::new(settings.n_t, settings.n_l, settings.method, &params.burst)?;
    match cf {
        Some(cf) => Ok((cf_distance(cf, &params, &spec, settings.time)?, 0.0)),
        None => {
            let g = GridSpec { time: settings.time, ..GridSpec::steady_state(data.rows, data.cols) }
                .without_aliasing_check();
            let model = solve_joint(&params, &g, &spec)?;
            Ok((kl_divergence(data, &model)?, model.negative_mass))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::JointDist;

    fn dist(rows: usize, cols: usize, p: Vec<f64>) -> JointDist {
        JointDist { rows, cols, p, mass_deficit: 0.0, negative_mass: 0.0, max_imag: 0.0, boundary_mass: 0.0 }
    }

    #[test]
    fn kl_examples() {
        let model = dist(2, 2, vec![0.5, 0.2, 0.2, 0.1]);
        let same = DataHist::from_pmf(model.p.clone(), 2, 2).unwrap();
        assert_eq!(kl_divergence(&same, &model).unwrap(), 0.0);
        let point = DataHist::from_counts(&[(0, 0)], 2, 2).unwrap();
        assert!((kl_divergence(&point, &model).unwrap() - 2f64.ln()).abs() < 1e-15);
        let other = DataHist::from_pmf(vec![0.25; 4], 2, 2).unwrap();
        assert!(kl_divergence(&other, &model).unwrap() > 0.0);
        let wrong = DataHist::from_pmf(vec![1.0, 0.0, 0.0], 1, 3).unwrap();
        assert!(matches!(kl_divergence(&wrong, &model), Err(Error::Shape(_))));
    }

    #[test]
    fn data_outside_the_grid_is_rejected() {
        let counts: Vec<_> = (0..100).map(|i| if i == 0 { (9, 9) } else { (0, 1) }).collect();
        assert!(matches!(DataHist::from_counts(&counts, 3, 3), Err(Error::Support { .. })));
    }

    #[test]
    fn ks_examples() {
        let a = JointDist::point_mass(3, 3, 1, 1);
        assert_eq!(ks_error(&a, &a).unwrap(), 0.0);
        let b = JointDist::point_mass(3, 3, 1, 2);
        assert_eq!(ks_error(&a, &b).unwrap(), 1.0);
        let c = JointDist::point_mass(3, 3, 2, 1);
        assert_eq!(ks_marginal_error(&a, &c).unwrap(), 1.0);
        assert_eq!(ks_marginal_error(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn empirical_cf_of_a_point_mass() {
        let d = DataHist::from_counts(&[(2, 1)], 4, 3).unwrap();
        let cf = EmpiricalCf::new(&d);
        for j in 0..4 {
            for k in 0..3 {
                let want = Complex64::from_polar(1.0, -std::f64::consts::TAU * (2.0 * j as f64 / 4.0 + k as f64 / 3.0));
                assert!((cf.get(j, k) - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cf_distance_vanishes_on_the_model() {
        let params = ModelParams::new(1.2, 1.0, 0.8, BurstDist::Geometric { b: 2.0 }).unwrap();
        let spec = ExpansionSpec::new(7, 7, Method::Quadrature, &params.burst).unwrap();
        let model = solve_joint(&params, &GridSpec::steady_state(48, 48), &spec).unwrap();
        let data = DataHist::from_pmf(model.p.clone(), 48, 48).unwrap();
        let d = cf_distance(&EmpiricalCf::new(&data), &params, &spec, TimeSpec::SteadyState).unwrap();
        assert!(d < 1e-20, "{d}");
        let off = ModelParams { k_i: 1.5, ..params };
        assert!(cf_distance(&EmpiricalCf::new(&data), &off, &spec, TimeSpec::SteadyState).unwrap() > 1e-6);
    }

    #[test]
    fn cf_distance_ignores_order_and_sharding() {
        let params = ModelParams::new(1.0, 1.0, 1.0, BurstDist::Geometric { b: 2.0 }).unwrap();
        let spec = ExpansionSpec::new(5, 5, Method::Expansion, &params.burst).unwrap();
        let counts: Vec<(u64, u64)> = (0..60).map(|i| (i % 5, (i * 7) % 6)).collect();
        let mut reversed = counts.clone();
        reversed.reverse();
        let full = DataHist::from_counts(&counts, 8, 8).unwrap();
        let rev = DataHist::from_counts(&reversed, 8, 8).unwrap();
        let (h1, _) = crate::ssa::histogram(&counts[..25], 8, 8);
        let (h2, _) = crate::ssa::histogram(&counts[25..], 8, 8);
        let merged: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| (25.0 * a + 35.0 * b) / 60.0).collect();
        let shards = DataHist::from_pmf(merged, 8, 8).unwrap();
        let d = |h: &DataHist| cf_distance(&EmpiricalCf::new(h), &params, &spec, TimeSpec::SteadyState).unwrap();
        let base = d(&full);
        assert!((d(&rev) - base).abs() <= 1e-15 * base);
        assert!((d(&shards) - base).abs() <= 1e-12 * base);
    }

    #[test]
    fn single_cell_sweep() {
        let params = ModelParams::new(1.0, 1.0, 1.0, BurstDist::Geometric { b: 2.0 }).unwrap();
        let spec = ExpansionSpec::new(7, 7, Method::Quadrature, &params.burst).unwrap();
        let model = solve_joint(&params, &GridSpec::steady_state(32, 32).without_aliasing_check(), &spec).unwrap();
        let data = DataHist::from_pmf(model.p.clone(), 32, 32).unwrap();
        let grid =
            ParamGrid { k_axis: vec![1.0], b_axis: vec![2.0], beta: 1.0, gamma: 1.0, kind: BurstKind::Geometric };
        let settings = SweepSettings {
            n_t: 7,
            n_l: 7,
            method: Method::Quadrature,
            divergence: Divergence::Kl,
            time: TimeSpec::SteadyState,
        };
        let l = sweep(&data, &grid, &settings).unwrap();
        assert_eq!(l.argmin(), Some((0, 0)));
        assert!(l.get(0, 0) < 1e-12);
        assert_eq!(l.seconds.len(), 1);
    }

    #[test]
    fn bad_cells_are_flagged() {
        let data = DataHist::from_pmf(vec![0.25; 4], 2, 2).unwrap();
        // b = 1 is not a valid shifted geometric mean
        let grid = ParamGrid {
            k_axis: vec![1.0],
            b_axis: vec![1.0, 2.0],
            beta: 1.0,
            gamma: 1.0,
            kind: BurstKind::ShiftedGeometric,
        };
        let settings = SweepSettings {
            n_t: 3,
            n_l: 3,
            method: Method::Expansion,
            divergence: Divergence::Kl,
            time: TimeSpec::SteadyState,
        };
        let l = sweep(&data, &grid, &settings).unwrap();
        assert!(l.flags[0].is_some() && l.values[0].is_nan());
        assert!(l.flags[1].is_none());
        assert_eq!(l.argmin(), Some((1, 0)));
    }

    #[test]
    fn axes_and_percentiles() {
        let a = log_axis(-1.0, 1.0, 3);
        assert!((a[0] - 0.1).abs() < 1e-15 && (a[1] - 1.0).abs() < 1e-15 && (a[2] - 10.0).abs() < 1e-14);
        assert_eq!(ParamGrid::nearest(&a, 2.5), 1);
        assert_eq!(percentile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert!(total_variation(&[0.5, 0.5], &[1.0, 0.0]) == 0.5);
    }
}
