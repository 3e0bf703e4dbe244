//! Oracles shared by the integration tests.
#![allow(dead_code)]

use bursty::specfun::ln_gamma;
use bursty::ModelParams;
use rand::Rng;

/// Transient solution of the master equation truncated to `rows × cols`,
/// by uniformization. Mass that leaves the box is dropped; the second value
/// is how much was lost.
pub fn fsp(params: &ModelParams, rows: usize, cols: usize, t: f64, initial: (usize, usize)) -> (Vec<f64>, f64) {
    let burst: Vec<f64> = (0..rows).map(|j| params.burst.pmf(j as u64)).collect();
    let rate = params.k_i + params.beta * (rows - 1) as f64 + params.gamma * (cols - 1) as f64;
    let step = |p: &[f64]| -> Vec<f64> {
        let mut q = p.to_vec();
        for n in 0..rows {
            for m in 0..cols {
                let x = p[n * cols + m];
                if x == 0.0 {
                    continue;
                }
                let out = params.k_i + params.beta * n as f64 + params.gamma * m as f64;
                q[n * cols + m] -= x * out / rate;
                for (j, &w) in burst.iter().enumerate().take(rows - n) {
                    q[(n + j) * cols + m] += x * params.k_i * w / rate;
                }
                if n > 0 && m + 1 < cols {
                    q[(n - 1) * cols + m + 1] += x * params.beta * n as f64 / rate;
                }
                if m > 0 {
                    q[n * cols + m - 1] += x * params.gamma * m as f64 / rate;
                }
            }
        }
        q
    };
    let lt = rate * t;
    let mut p = vec![0.0; rows * cols];
    p[initial.0 * cols + initial.1] = 1.0;
    let mut out = vec![0.0; rows * cols];
    let last = (lt + 12.0 * lt.sqrt() + 40.0).ceil() as u32;
    for k in 0..=last {
        let w = (-lt + f64::from(k) * lt.ln() - ln_gamma(f64::from(k) + 1.0)).exp();
        out.iter_mut().zip(&p).for_each(|(o, x)| *o += w * x);
        p = step(&p);
    }
    let lost = 1.0 - out.iter().sum::<f64>();
    (out, lost)
}

/// `q`-quantile of the total variation between `pmf` and a histogram of
/// `draws` samples from it, over `replicates` simulated datasets.
pub fn multinomial_tv_quantile(pmf: &[f64], draws: usize, replicates: usize, q: f64, rng: &mut impl Rng) -> f64 {
    let total: f64 = pmf.iter().sum();
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &x in pmf {
        acc += x.max(0.0) / total;
        cdf.push(acc);
    }
    let mut tvs: Vec<f64> = (0..replicates)
        .map(|_| {
            let mut h = vec![0.0; pmf.len()];
            for _ in 0..draws {
                let r: f64 = rng.gen::<f64>() * acc;
                let idx = cdf.partition_point(|&c| c <= r).min(pmf.len() - 1);
                h[idx] += 1.0;
            }
            0.5 * h.iter().zip(pmf).map(|(c, p)| (c / draws as f64 - p / total).abs()).sum::<f64>()
        })
        .collect();
    tvs.sort_by(f64::total_cmp);
    tvs[((q * (replicates - 1) as f64).round() as usize).min(replicates - 1)]
}
