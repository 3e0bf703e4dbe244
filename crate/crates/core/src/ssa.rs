//! Gillespie simulation of burst production, splicing and degradation.
//!
//! Each cell draws from its own ChaCha stream keyed by `(seed, cell)`, so the
//! output does not depend on the number of worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characteristics::ModelParams;
use crate::error::{Error, Result};

/// Default per-cell event cap.
pub const DEFAULT_MAX_EVENTS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Record {
    Endpoint,
    Trajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsaConfig {
    pub params: ModelParams,
    pub t_final: f64,
    pub n_cells: usize,
    pub seed: u64,
    pub record: Record,
    /// Molecules present at `t = 0`.
    pub initial: (u64, u64),
    pub max_events: u64,
}

impl SsaConfig {
    pub fn new(params: ModelParams, t_final: f64, n_cells: usize, seed: u64) -> Self {
        Self {
            params,
            t_final,
            n_cells,
            seed,
            record: Record::Endpoint,
            initial: (0, 0),
            max_events: DEFAULT_MAX_EVENTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_final = {}", self.t_final)));
        }
        if self.n_cells == 0 {
            return Err(Error::InvalidParameter("n_cells must be >= 1".into()));
        }
        Ok(())
    }
}

/// State after an event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub n: u64,
    pub m: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    /// `(n, m)` at `t_final`, one per cell in cell order.
    pub counts: Vec<(u64, u64)>,
    /// Event lists per cell, starting with the initial state (trajectory mode only).
    pub trajectories: Option<Vec<Vec<Event>>>,
    pub seed: u64,
}

impl SampleSet {
    /// Empirical joint PMF on a `rows × cols` grid and the mass that falls outside it.
    pub fn histogram(&self, rows: usize, cols: usize) -> (Vec<f64>, f64) {
        histogram(&self.counts, rows, cols)
    }
}

/// Empirical joint PMF on a `rows × cols` grid and the mass that falls outside it.
pub fn histogram(counts: &[(u64, u64)], rows: usize, cols: usize) -> (Vec<f64>, f64) {
    let mut h = vec![0.0; rows * cols];
    let mut outside = 0usize;
    for &(n, m) in counts {
        if (n as usize) < rows && (m as usize) < cols {
            h[n as usize * cols + m as usize] += 1.0;
        } else {
            outside += 1;
        }
    }
    let total = counts.len().max(1) as f64;
    h.iter_mut().for_each(|x| *x /= total);
    (h, outside as f64 / total)
}

/// RNG for one cell.
pub fn cell_rng(seed: u64, cell: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    rng
}

/// Run `n_cells` independent simulations to `t_final`.
pub fn simulate(config: &SsaConfig) -> Result<SampleSet> {
    config.validate()?;
    let keep = config.record == Record::Trajectory;
    let cells: Vec<(Event, Option<Vec<Event>>)> = (0..config.n_cells as u64)
        .into_par_iter()
        .map(|cell| simulate_cell(config, cell, keep))
        .collect::<Result<_>>()?;
    let counts = cells.iter().map(|(e, _)| (e.n, e.m)).collect();
    let trajectories = keep.then(|| cells.into_iter().map(|(_, t)| t.unwrap_or_default()).collect());
    Ok(SampleSet { counts, trajectories, seed: config.seed })
}

fn simulate_cell(config: &SsaConfig, cell: u64, keep: bool) -> Result<(Event, Option<Vec<Event>>)> {
    let p = &config.params;
    let mut rng = cell_rng(config.seed, cell);
    let (mut n, mut m) = config.initial;
    let mut t = 0.0;
    let mut path = keep.then(|| vec![Event { t, n, m }]);
    let mut events = 0u64;
    loop {
        let burst = p.k_i;
        let splice = p.beta * n as f64;
        let total = burst + splice + p.gamma * m as f64;
        if total <= 0.0 {
            break;
        }
        let wait = -(1.0 - rng.gen::<f64>()).ln() / total;
        if t + wait > config.t_final {
            break;
        }
        t += wait;
        let pick = rng.gen::<f64>() * total;
        if pick < burst {
            n += p.burst.sample(&mut rng);
        } else if pick < burst + splice {
            n -= 1;
            m += 1;
        } else {
            m -= 1;
        }
        events += 1;
        if events > config.max_events {
            return Err(Error::EventCap { cell, cap: config.max_events });
        }
        if let Some(path) = path.as_mut() {
            path.push(Event { t, n, m });
        }
    }
    Ok((Event { t: config.t_final, n, m }, path))
}
