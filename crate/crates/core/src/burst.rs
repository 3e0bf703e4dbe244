//! Burst-size laws and the series coefficients of `M(1+u) - 1`.
//!
//! Unbounded laws (geometric and shifted geometric) are functions of `X = c u`
//! and are expanded twice: a Taylor series centred at `X = -1` for small `|u|`
//! and a Laurent series in `1/u` for large `|u|`. Finite-support laws have an exact
//! polynomial expansion and never need the Laurent branch.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{binom, gauss_2f1_real_dd, ln_binom, DoubleDouble};

/// Denominators of `M(1+u) - 1` smaller than this raise a pole error.
pub const POLE_EPSILON: f64 = 1e-12;

/// Distribution of the number of transcripts produced per burst.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BurstDist {
    /// Support `0, 1, ...` with mean `b`.
    Geometric { b: f64 },
    /// Support `1, 2, ...` with mean `b > 1`.
    ShiftedGeometric { b: f64 },
    /// Exactly `b` transcripts per burst.
    BStep { b: u32 },
    /// Uniform on `a..=b`.
    Uniform { a: u32, b: u32 },
}

/// Which series a coefficient set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Taylor,
    Laurent,
}

/// Truncated series `Σ Ω_i u^i`.
///
/// `ln_abs` and `sign` hold the same coefficients in log form; they stay
/// finite when `coeffs` overflows (large `b` with high orders).
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub regime: Regime,
    pub powers: Vec<i32>,
    pub coeffs: Vec<f64>,
    pub ln_abs: Vec<f64>,
    pub sign: Vec<f64>,
}

impl SeriesCoefficients {
    fn from_log(regime: Regime, powers: Vec<i32>, terms: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(k) = terms.iter().position(|&(l, _)| l.is_nan() || l == f64::INFINITY) {
            return Err(Error::Overflow {
                op: "series coefficients",
                detail: format!("coefficient of u^{} is not finite", powers[k]),
            });
        }
        let coeffs = terms.iter().map(|&(l, s)| s * l.exp()).collect();
        let (ln_abs, sign) = terms.into_iter().unzip();
        Ok(Self { regime, powers, coeffs, ln_abs, sign })
    }

    fn from_values(regime: Regime, powers: Vec<i32>, coeffs: Vec<f64>) -> Result<Self> {
        let terms = coeffs.iter().map(|&c| (c.abs().ln(), if c < 0.0 { -1.0 } else { 1.0 })).collect();
        let mut out = Self::from_log(regime, powers, terms)?;
        out.coeffs = coeffs;
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// Evaluate the truncated series at `u`.
    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.powers.iter().zip(&self.coeffs).map(|(&p, &c)| u.powi(p) * c).sum()
    }
}

impl BurstDist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            BurstDist::Geometric { b } => b.is_finite() && b > 0.0,
            BurstDist::ShiftedGeometric { b } => b.is_finite() && b > 1.0,
            BurstDist::BStep { b } => b >= 1,
            BurstDist::Uniform { a, b } => a >= 1 && a <= b,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("burst distribution {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            BurstDist::Geometric { b } | BurstDist::ShiftedGeometric { b } => b,
            BurstDist::BStep { b } => f64::from(b),
            BurstDist::Uniform { a, b } => 0.5 * f64::from(a + b),
        }
    }

    /// True for laws with bounded support, whose Taylor series is exact.
    pub fn is_finite_support(&self) -> bool {
        matches!(self, BurstDist::BStep { .. } | BurstDist::Uniform { .. })
    }

    /// Scale `c` with `X = c u`: the unbounded laws are functions of `X` alone.
    fn scale(&self) -> Option<f64> {
        match *self {
            BurstDist::Geometric { b } => Some(b),
            BurstDist::ShiftedGeometric { b } => Some(b - 1.0),
            _ => None,
        }
    }

    /// Default Taylor/Laurent switching radius `α`; `None` for finite support.
    pub fn default_threshold(&self) -> Option<f64> {
        self.scale().map(|c| (1.0 + 3f64.sqrt()) / (2.0 * c))
    }

    /// Interval of `α` for which both series converge on `Re u <= 0`.
    pub fn threshold_bounds(&self) -> Option<(f64, f64)> {
        self.scale().map(|c| (1.0 / c, 3f64.sqrt() / c))
    }

    /// Probability of a burst of size `n`.
    pub fn pmf(&self, n: u64) -> f64 {
        match *self {
            BurstDist::Geometric { b } => {
                let p = 1.0 / (1.0 + b);
                p * (1.0 - p).powf(n as f64)
            }
            BurstDist::ShiftedGeometric { b } => {
                if n == 0 {
                    return 0.0;
                }
                let p = 1.0 / b;
                p * (1.0 - p).powf((n - 1) as f64)
            }
            BurstDist::BStep { b } => f64::from(u8::from(n == u64::from(b))),
            BurstDist::Uniform { a, b } => {
                if n >= u64::from(a) && n <= u64::from(b) {
                    1.0 / f64::from(b - a + 1)
                } else {
                    0.0
                }
            }
        }
    }

    /// Draw one burst size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            BurstDist::Geometric { b } => geometric_failures(rng, 1.0 / (1.0 + b)),
            BurstDist::ShiftedGeometric { b } => 1 + geometric_failures(rng, 1.0 / b),
            BurstDist::BStep { b } => u64::from(b),
            BurstDist::Uniform { a, b } => u64::from(rng.gen_range(a..=b)),
        }
    }

    /// `M(1+u) - 1`, the factorial-moment generating function minus one.
    pub fn fmgf_minus_one(&self, u: Complex64) -> Result<Complex64> {
        match *self {
            BurstDist::Geometric { b } => {
                let den = 1.0 - b * u;
                check_pole(den)?;
                Ok(b * u / den)
            }
            BurstDist::ShiftedGeometric { b } => {
                let den = 1.0 + (1.0 - b) * u;
                check_pole(den)?;
                Ok(b * u / den)
            }
            BurstDist::BStep { b } => Ok((1.0 + u).powu(b) - 1.0),
            BurstDist::Uniform { a, b } => {
                let x = 1.0 + u;
                let mut term = x.powu(a);
                let mut sum = Complex64::new(0.0, 0.0);
                for _ in a..=b {
                    sum += term;
                    term *= x;
                }
                Ok(sum / f64::from(b - a + 1) - 1.0)
            }
        }
    }

    /// Taylor coefficients for powers `1..=n_t` (or `1..=b` for finite support).
    ///
    /// For the unbounded laws the series is centred at `X = -1` and the
    /// constant `-2^{-n_t-1}` (times `b/(b-1)` for the shifted law) left by
    /// truncation is dropped so that the series vanishes at `u = 0`.
    pub fn taylor_coefficients(&self, n_t: u32) -> Result<SeriesCoefficients> {
        self.validate()?;
        match *self {
            BurstDist::Geometric { .. } | BurstDist::ShiftedGeometric { .. } => {
                if n_t == 0 {
                    return Err(Error::InvalidParameter("Taylor order must be >= 1".into()));
                }
                let (ln_pre, ln_c) = self.prefactor();
                let terms: Vec<_> =
                    (1..=n_t).map(|i| (ln_pre + f64::from(i) * ln_c + ln_geometric_sum(i, n_t), 1.0)).collect();
                let mut out = SeriesCoefficients::from_log(Regime::Taylor, (1..=n_t as i32).collect(), terms)?;
                let (pre, c) = (ln_pre.exp(), ln_c.exp());
                for (k, coeff) in out.coeffs.iter_mut().enumerate() {
                    let i = k as u32 + 1;
                    let direct = pre * c.powi(i as i32) * geometric_sum(i, n_t);
                    if direct.is_finite() && direct > 0.0 {
                        *coeff = direct;
                    }
                }
                Ok(out)
            }
            BurstDist::BStep { b } => {
                let coeffs = (1..=b).map(|i| binom(u64::from(b), u64::from(i))).collect();
                SeriesCoefficients::from_values(Regime::Taylor, (1..=b as i32).collect(), coeffs)
            }
            BurstDist::Uniform { a, b } => {
                let n = f64::from(b - a + 1);
                let coeffs = (1..=b)
                    .map(|i| {
                        let upper = binom(u64::from(b) + 1, u64::from(i) + 1);
                        let lower = if i < a { binom(u64::from(a), u64::from(i) + 1) } else { 0.0 };
                        (upper - lower) / n
                    })
                    .collect();
                SeriesCoefficients::from_values(Regime::Taylor, (1..=b as i32).collect(), coeffs)
            }
        }
    }

    /// Constant dropped from the truncated Taylor series.
    pub fn taylor_truncation_constant(&self, n_t: u32) -> f64 {
        let (ln_pre, _) = self.prefactor();
        -(ln_pre.exp()) * 0.5f64.powi(n_t as i32 + 1)
    }

    /// `(ln p, ln c)` with `Ω_i = p c^i S_i`.
    fn prefactor(&self) -> (f64, f64) {
        match *self {
            BurstDist::Geometric { b } => (0.0, b.ln()),
            BurstDist::ShiftedGeometric { b } => ((b / (b - 1.0)).ln(), (b - 1.0).ln()),
            _ => (0.0, 0.0),
        }
    }

    /// Laurent coefficients for powers `0, -1, ..., -n_l`.
    pub fn laurent_coefficients(&self, n_l: u32) -> Result<SeriesCoefficients> {
        self.validate()?;
        let powers = (0..=n_l as i32).map(|i| -i).collect();
        let (terms, direct): (Vec<_>, Vec<_>) = match *self {
            BurstDist::Geometric { b } => {
                (0..=n_l).map(|i| ((-f64::from(i) * b.ln(), -1.0), -b.powi(-(i as i32)))).unzip()
            }
            BurstDist::ShiftedGeometric { b } => (0..=n_l)
                .map(|i| {
                    let ln = b.ln() - f64::from(i + 1) * (b - 1.0).ln();
                    ((ln, -1.0), -b / (b - 1.0).powi(i as i32 + 1))
                })
                .unzip(),
            _ => {
                return Err(Error::Unsupported {
                    op: "laurent_coefficients",
                    what: format!("finite-support law {self:?}"),
                })
            }
        };
        let mut out = SeriesCoefficients::from_log(Regime::Laurent, powers, terms)?;
        for (coeff, d) in out.coeffs.iter_mut().zip(direct) {
            if d.is_finite() && d != 0.0 {
                *coeff = d;
            }
        }
        Ok(out)
    }

    /// Closed form of the `i`-th Taylor coefficient through `2F1(1, n_t+2; n_t+2-i; 1/2)`.
    pub fn taylor_coefficient_hypergeometric(&self, n_t: u32, i: u32) -> Result<f64> {
        let (ln_pre, ln_c) = match self {
            BurstDist::Geometric { .. } | BurstDist::ShiftedGeometric { .. } => self.prefactor(),
            _ => return Err(Error::Unsupported { op: "taylor_coefficient_hypergeometric", what: format!("{self:?}") }),
        };
        if i == 0 || i > n_t {
            return Err(Error::InvalidParameter(format!("power {i} outside 1..={n_t}")));
        }
        let f = gauss_2f1_real_dd(1.0, f64::from(n_t + 2), f64::from(n_t + 2 - i), 0.5)?;
        let weight = binom(u64::from(n_t) + 1, u64::from(i)) * 0.5f64.powi(n_t as i32 + 2);
        let bracket = (DoubleDouble::from_f64(1.0) - f.mul_f64(weight)).to_f64();
        Ok(ln_pre.exp() * ln_c.exp().powi(i as i32) * bracket)
    }
}

/// `(1/2) Σ_{j=i}^{n} 2^{-j} C(j, i)`.
fn geometric_sum(i: u32, n: u32) -> f64 {
    (i..=n).map(|j| binom(u64::from(j), u64::from(i)) * 0.5f64.powi(j as i32 + 1)).sum()
}

/// `ln[(1/2) Σ_{j=i}^{n} 2^{-j} C(j, i)]`.
fn ln_geometric_sum(i: u32, n: u32) -> f64 {
    // terms rise then fall; factor out the largest in log space
    let logs: Vec<f64> = (i..=n).map(|j| ln_binom(u64::from(j), u64::from(i)) - f64::from(j + 1) * 2f64.ln()).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

fn check_pole(den: Complex64) -> Result<()> {
    if den.norm() < POLE_EPSILON {
        Err(Error::Pole { op: "fmgf_minus_one", magnitude: den.norm() })
    } else {
        Ok(())
    }
}

/// Failures before the first success with success probability `p`.
fn geometric_failures<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    (u.ln() / (1.0 - p).ln()).floor() as u64
}
