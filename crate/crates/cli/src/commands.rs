//! The four subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::hint::black_box;
use std::time::Instant;

use bursty::inference::{
    ks_error, ks_marginal_error, log_axis, percentile, sweep, total_variation, DataHist, ParamGrid, SweepSettings,
};
use bursty::solver::solve_joint;
use bursty::specfun::{e1_reference, e1_region, expint_e1, E1Region};
use bursty::ssa::{simulate, SsaConfig};
use bursty::{Complex64, JointDist, Method, ModelParams};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{matrix_csv, num, table_csv, OutDir};

fn label(method: Method) -> &'static str {
    match method {
        Method::Expansion => "expansion",
        Method::Quadrature => "quadrature",
    }
}

fn solve_one(cfg: &RunConfig, params: &ModelParams, method: Method) -> Result<(JointDist, f64), CliError> {
    let spec = cfg.expansion.spec(method, &params.burst).map_err(|e| CliError::solver("solve", e))?;
    let start = Instant::now();
    let dist = solve_joint(params, &cfg.grid, &spec).map_err(|e| CliError::solver("solve", e))?;
    Ok((dist, start.elapsed().as_secs_f64()))
}

/// Joint distribution CSV per method, metadata JSON, and a comparison for `--method both`.
pub fn cmd_solve(cfg: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let params = cfg.model()?;
    let mut runs = Vec::new();
    let mut dists = Vec::new();
    for method in cfg.expansion.method.methods() {
        let (dist, seconds) = solve_one(cfg, params, method)?;
        let file = format!("joint_{}.csv", label(method));
        out.write(&file, &matrix_csv(&dist.p, dist.cols))?;
        let (mean_n, mean_m) = dist.means();
        runs.push(json!({
            "method": method,
            "file": file,
            "n_l": cfg.expansion.n_l,
            "n_t": cfg.expansion.n_t,
            "seconds": seconds,
            "mass_deficit": dist.mass_deficit,
            "negative_mass": dist.negative_mass,
            "max_imag": dist.max_imag,
            "boundary_mass": dist.boundary_mass,
            "mean_nascent": mean_n,
            "mean_mature": mean_m,
        }));
        dists.push(dist);
    }
    let mut meta = json!({ "command": "solve", "config": cfg, "runs": runs });
    if let [a, b] = dists.as_slice() {
        let comparison = json!({
            "ks_joint": ks_error(a, b).map_err(|e| CliError::solver("compare", e))?,
            "ks_marginal": ks_marginal_error(a, b).map_err(|e| CliError::solver("compare", e))?,
            "total_variation": total_variation(&a.p, &b.p),
        });
        out.write_json("comparison.json", &comparison)?;
        meta["comparison"] = comparison;
    }
    out.write_json("metadata.json", &meta)?;
    Ok(())
}

/// Endpoint samples (and trajectories when requested) as CSV.
pub fn cmd_simulate(cfg: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let params = *cfg.model()?;
    let s = &cfg.simulate;
    let ssa = SsaConfig {
        record: s.record,
        initial: cfg.grid.initial.unwrap_or((0, 0)),
        max_events: s.max_events,
        ..SsaConfig::new(params, s.t_final, s.cells, s.seed)
    };
    let start = Instant::now();
    let samples = simulate(&ssa).map_err(|e| CliError::solver("simulate", e))?;
    let seconds = start.elapsed().as_secs_f64();
    let rows = samples.counts.iter().enumerate().map(|(c, &(n, m))| vec![c.to_string(), n.to_string(), m.to_string()]);
    out.write("samples.csv", &table_csv(&["cell", "n", "m"], rows))?;
    if let Some(paths) = &samples.trajectories {
        let rows = paths.iter().enumerate().flat_map(|(c, path)| {
            path.iter().map(move |e| vec![c.to_string(), num(e.t), e.n.to_string(), e.m.to_string()])
        });
        out.write("trajectories.csv", &table_csv(&["cell", "t", "n", "m"], rows))?;
    }
    let cells = samples.counts.len() as f64;
    let mean_n = samples.counts.iter().map(|c| c.0 as f64).sum::<f64>() / cells;
    let mean_m = samples.counts.iter().map(|c| c.1 as f64).sum::<f64>() / cells;
    let meta = json!({
        "command": "simulate",
        "config": cfg,
        "seconds": seconds,
        "mean_nascent": mean_n,
        "mean_mature": mean_m,
    });
    out.write_json("metadata.json", &meta)?;
    Ok(())
}

/// Read `(n, m)` pairs from the last two columns of a CSV, skipping a header line.
fn read_counts(path: &std::path::Path) -> Result<Vec<(u64, u64)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io("read data", path, e))?;
    let mut counts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if line.trim().is_empty() || (i == 0 && fields.iter().any(|f| f.parse::<f64>().is_err())) {
            continue;
        }
        let bad = || CliError {
            line: Some(i + 1),
            context: json!({ "path": path.display().to_string() }),
            ..CliError::config(None, format!("data line {}: expected integer n,m columns", i + 1))
        };
        if fields.len() < 2 {
            return Err(bad());
        }
        let n = fields[fields.len() - 2].parse().map_err(|_| bad())?;
        let m = fields[fields.len() - 1].parse().map_err(|_| bad())?;
        counts.push((n, m));
    }
    if counts.is_empty() {
        return Err(CliError::config(None, format!("no samples in {}", path.display())));
    }
    Ok(counts)
}

#[derive(Serialize)]
struct OrdersRecord {
    n_l: u32,
    n_t: u32,
    median_ks: f64,
    max_ks: f64,
    median_seconds: f64,
    failed: usize,
}

/// Divergence landscapes over the trial grid, and optionally the order sweep.
pub fn cmd_sweep(cfg: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let params = cfg.model()?;
    let path = cfg
        .sweep
        .data
        .as_ref()
        .ok_or_else(|| CliError::config(None, "no data file: set [sweep] data or pass --data"))?;
    let counts = read_counts(path)?;
    let data = DataHist::from_counts(&counts, cfg.grid.n, cfg.grid.m).map_err(|e| CliError::solver("sweep", e))?;
    let w = &cfg.sweep;
    let grid = ParamGrid {
        k_axis: log_axis(w.k_log10[0], w.k_log10[1], w.k_len),
        b_axis: log_axis(w.b_log10[0], w.b_log10[1], w.b_len),
        beta: params.beta,
        gamma: params.gamma,
        kind: w.kind,
    };
    let mut landscapes = Vec::new();
    let mut argmins = Vec::new();
    for method in cfg.expansion.method.methods() {
        let settings = SweepSettings {
            n_t: cfg.expansion.n_t,
            n_l: cfg.expansion.n_l,
            method,
            divergence: w.divergence,
            time: cfg.grid.time,
        };
        let land = sweep(&data, &grid, &settings).map_err(|e| CliError::solver("sweep", e))?;
        let file = format!("landscape_{}.csv", label(method));
        let rows = (0..land.b_len).flat_map(|ib| {
            let (land, grid) = (&land, &grid);
            (0..land.k_len).map(move |ik| {
                let i = ib * land.k_len + ik;
                vec![
                    num(grid.b_axis[ib]),
                    num(grid.k_axis[ik]),
                    num(land.values[i]),
                    num(land.negative_mass[i]),
                    num(land.seconds[i]),
                    land.flags[i].clone().unwrap_or_default().replace(',', ";"),
                ]
            })
        });
        out.write(&file, &table_csv(&["b", "k", "value", "negative_mass", "seconds", "flag"], rows))?;
        let argmin = land.argmin();
        argmins.push(argmin);
        landscapes.push(json!({
            "method": method,
            "file": file,
            "argmin": argmin.map(|(ib, ik)| json!({
                "ib": ib, "ik": ik, "b": grid.b_axis[ib], "k": grid.k_axis[ik], "value": land.get(ib, ik),
            })),
            "median_seconds": land.median_seconds(),
            "range": land.range(),
            "flagged": land.flags.iter().filter(|f| f.is_some()).count(),
        }));
    }
    let mut meta = json!({
        "command": "sweep",
        "config": cfg,
        "samples": counts.len(),
        "out_of_grid": data.out_of_grid,
        "landscapes": landscapes,
    });
    if let [a, b] = argmins.as_slice() {
        meta["argmins_coincide"] = json!(a == b);
    }
    if w.orders_sweep {
        let (records, quad_seconds) = orders_sweep(cfg, &grid)?;
        let rows = records.iter().map(|r| {
            vec![
                r.n_l.to_string(),
                r.n_t.to_string(),
                num(r.median_ks),
                num(r.max_ks),
                num(r.median_seconds),
                r.failed.to_string(),
            ]
        });
        out.write("orders.csv", &table_csv(&["n_l", "n_t", "median_ks", "max_ks", "median_seconds", "failed"], rows))?;
        meta["orders_sweep"] =
            json!({ "file": "orders.csv", "records": records, "quadrature_median_seconds": quad_seconds });
    }
    out.write_json("metadata.json", &meta)?;
    Ok(())
}

/// KS error of every `(N_L, N_T) ∈ {1..7}²` against quadrature, summarised over the trial grid.
fn orders_sweep(cfg: &RunConfig, grid: &ParamGrid) -> Result<(Vec<OrdersRecord>, f64), CliError> {
    let spec_grid = cfg.grid.without_aliasing_check();
    let mut cells = Vec::new();
    let mut quad_seconds = Vec::new();
    for ib in 0..grid.b_axis.len() {
        for ik in 0..grid.k_axis.len() {
            let params = grid.params(ib, ik).map_err(|e| CliError::solver("orders sweep", e))?;
            let spec = cfg
                .expansion
                .spec(Method::Quadrature, &params.burst)
                .map_err(|e| CliError::solver("orders sweep", e))?;
            let start = Instant::now();
            let reference = solve_joint(&params, &spec_grid, &spec).map_err(|e| CliError::solver("orders sweep", e))?;
            quad_seconds.push(start.elapsed().as_secs_f64());
            cells.push((params, reference));
        }
    }
    let mut records = Vec::new();
    for n_l in 1..=7 {
        for n_t in 1..=7 {
            let mut ks = Vec::new();
            let mut seconds = Vec::new();
            let mut failed = 0;
            for (params, reference) in &cells {
                let start = Instant::now();
                let result = bursty::ExpansionSpec::new(n_t, n_l, Method::Expansion, &params.burst)
                    .and_then(|spec| solve_joint(params, &spec_grid, &spec))
                    .and_then(|d| ks_error(&d, reference));
                seconds.push(start.elapsed().as_secs_f64());
                match result {
                    Ok(v) => ks.push(v),
                    Err(_) => failed += 1,
                }
            }
            records.push(OrdersRecord {
                n_l,
                n_t,
                median_ks: percentile(&ks, 0.5),
                max_ks: ks.iter().copied().fold(f64::NAN, f64::max),
                median_seconds: percentile(&seconds, 0.5),
                failed,
            });
        }
    }
    Ok((records, percentile(&quad_seconds, 0.5)))
}

#[derive(Default, Serialize)]
struct RegionSummary {
    points: usize,
    max_rel_error: f64,
    mean_ns: f64,
    reference_mean_ns: f64,
    /// Reference time over kernel time.
    speed_ratio: f64,
}

/// Exponential-integral accuracy and timing over a square grid.
pub fn cmd_bench_expint(cfg: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let b = &cfg.bench;
    let axis: Vec<f64> = (0..b.len).map(|i| -b.extent + 2.0 * b.extent * i as f64 / (b.len - 1) as f64).collect();
    let mut rows = Vec::new();
    let mut summary: BTreeMap<&'static str, RegionSummary> = BTreeMap::new();
    let mut worst = 0.0f64;
    for &x in &axis {
        for &y in &axis {
            let z = Complex64::new(x, y);
            let region = e1_region(z);
            if b.region.is_some_and(|r| r != region) || z.norm() == 0.0 {
                continue;
            }
            let start = Instant::now();
            let value = black_box(expint_e1(black_box(z)));
            let ns = start.elapsed().as_nanos() as f64;
            let start = Instant::now();
            let reference = black_box(e1_reference(black_box(z)));
            let reference_ns = start.elapsed().as_nanos() as f64;
            let (value, reference) = match (value, reference) {
                (Ok(v), Ok(r)) => (v, r),
                (Err(e), _) | (_, Err(e)) => return Err(CliError::solver("bench-expint", e)),
            };
            let err = (value - reference).norm() / reference.norm();
            worst = worst.max(err);
            let s = summary.entry(region.label()).or_default();
            s.points += 1;
            s.max_rel_error = s.max_rel_error.max(err);
            s.mean_ns += ns;
            s.reference_mean_ns += reference_ns;
            rows.push(vec![
                num(x),
                num(y),
                region.label().to_string(),
                num(err),
                ns.to_string(),
                reference_ns.to_string(),
            ]);
        }
    }
    for s in summary.values_mut() {
        s.mean_ns /= s.points as f64;
        s.reference_mean_ns /= s.points as f64;
        s.speed_ratio = s.reference_mean_ns / s.mean_ns;
    }
    out.write("expint.csv", &table_csv(&["x", "y", "region", "rel_error", "ns", "reference_ns"], rows))?;
    let bound = 10f64.powf(-7.9);
    let meta = json!({
        "command": "bench-expint",
        "config": cfg,
        "points": summary.values().map(|s| s.points).sum::<usize>(),
        "max_rel_error": worst,
        "bound": bound,
        "within_bound": worst <= bound,
        "regions": summary,
        "region_order": E1Region::ALL.iter().map(|r| r.label()).collect::<Vec<_>>(),
    });
    out.write_json("summary.json", &meta)?;
    Ok(())
}
