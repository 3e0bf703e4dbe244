//! Closed-form definite integrals `∫_{s1}^{s2} U(s)^p ds`.
//!
//! With `w = u + γ v s` in the degenerate case (`β = γ`) and `A = v f`,
//! `B = u - v f` otherwise, the antiderivatives are:
//!
//! | case | `p = n > 0` | `p = -n < 0` |
//! |---|---|---|
//! | `β = γ` | `-(e^{-nγs}/γ) Σ_k c_k w^k v^{n-k}` | `-(w^{1-n}/(γ v)) e^{nγs} e^z E_n(z)`, `z = -(n/v) w` |
//! | `β ≠ γ` | `Σ_j C(n,j) A^j B^{n-j} e^{λ_j s}/λ_j` | `-(A^p/(dσ)) e^{-pγs} 2F1(-p, σ; σ+1; ζ)` |
//!
//! where `c_n = 1/n`, `c_{k-1} = c_k k/n`, `λ_j = -(jγ + (n-j)β)`, `d = β - γ`,
//! `σ = pγ/d` and `ζ = -(B/A) e^{-d s}`. For integer `σ` the hypergeometric
//! function is replaced by the exact integral of the rational function
//! `t^{σ-1} (1-t)^p`.

use num_complex::Complex64;

use crate::burst::SeriesCoefficients;
use crate::characteristics::{eval_u, CharArgs, ModelParams};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::specfun::{binom, expint_e1_scaled, expint_en_scaled, gauss_2f1_conditioned};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Gap to the nearest integer below which `σ` is treated as an integer.
const INTEGER_SIGMA_EPS: f64 = 1e-9;
/// Gap below which the hypergeometric connection formula is too ill-conditioned.
const NEAR_INTEGER_SIGMA: f64 = 1e-5;
/// Largest tolerated ratio of summed term magnitudes to a closed-form result.
const MAX_CANCELLATION: f64 = 1e5;

fn check_limits(s1: f64, s2: f64) -> Result<()> {
    if s1 >= 0.0 && s2 >= s1 && s2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("integration limits [{s1}, {s2}]")))
    }
}

/// `(e^{λ s2} - e^{λ s1}) / λ`, accurate for short intervals.
fn exp_difference(lambda: f64, s1: f64, s2: f64) -> f64 {
    if lambda == 0.0 {
        return s2 - s1;
    }
    (lambda * s1).exp() * (lambda * (s2 - s1)).exp_m1() / lambda
}

/// `∫ Ω_0 ds` for the constant Laurent term, before weighting: `s2 - s1`.
pub fn constant_term(s1: f64, s2: f64) -> f64 {
    s2 - s1
}

/// `∫ e^{-nγs} (u + γvs)^n ds` (`β = γ`).
pub fn taylor_term_degenerate(n: u32, s1: f64, s2: f64, args: CharArgs, params: &ModelParams) -> Result<Complex64> {
    check_limits(s1, s2)?;
    let CharArgs { u, v } = args;
    let g = params.gamma;
    let nf = f64::from(n);
    if v == ZERO {
        return Ok(u.powu(n) * exp_difference(-nf * g, s1, s2));
    }
    // with y = n w / v the integral is an incomplete gamma function of y; the
    // upper form cancels inside |y| < n + 1 and the lower form outside
    let radius = nf + 1.0;
    let y_at = |s: f64| (u + v * (g * s)) * nf / v;
    let mut cuts = vec![s1];
    let y1 = y_at(s1);
    let rate = nf * g;
    let disc = y1.re * y1.re - y1.norm_sqr() + radius * radius;
    if disc > 0.0 {
        for r in [-y1.re - disc.sqrt(), -y1.re + disc.sqrt()] {
            let s = s1 + r / rate;
            if s > s1 && s < s2 {
                cuts.push(s);
            }
        }
    }
    cuts.push(s2);
    let mut coeffs = vec![0.0; n as usize + 1];
    coeffs[n as usize] = 1.0 / nf;
    for k in (1..=n as usize).rev() {
        coeffs[k - 1] = coeffs[k] * k as f64 / nf;
    }
    // -(e^{-nγs}/γ) Σ_k c_k w^k v^{n-k}, Horner in w
    let upper = |s: f64| {
        let w = u + v * (g * s);
        let mut acc = Complex64::new(coeffs[n as usize], 0.0);
        let mut vpow = Complex64::new(1.0, 0.0);
        for k in (0..n as usize).rev() {
            vpow *= v;
            acc = acc * w + vpow * coeffs[k];
        }
        -acc * (-nf * g * s).exp() / g
    };
    // w^{n+1} e^{-nγs} Σ_k y^k / ((n+1)...(n+1+k)) / (γ v)
    let lower = |s: f64| -> Result<Complex64> {
        let w = u + v * (g * s);
        let y = w * nf / v;
        let mut term = Complex64::new(1.0 / (nf + 1.0), 0.0);
        let mut sum = term;
        let mut k = 1.0;
        while term.norm() > 1e-17 * sum.norm() {
            term *= y / (nf + 1.0 + k);
            sum += term;
            k += 1.0;
            if k > 2000.0 {
                return Err(Error::Convergence { op: "taylor_term_degenerate", detail: format!("y = {y}") });
            }
        }
        Ok(w.powu(n + 1) * sum * (-nf * g * s).exp() / (g * v))
    };
    let mut total = ZERO;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        total += if y_at(0.5 * (a + b)).norm() < radius { lower(b)? - lower(a)? } else { upper(b) - upper(a) };
    }
    Ok(total)
}

/// `∫ e^{nγs} (u + γvs)^{-n} ds` (`β = γ`).
pub fn laurent_term_degenerate(n: u32, s1: f64, s2: f64, args: CharArgs, params: &ModelParams) -> Result<Complex64> {
    check_limits(s1, s2)?;
    let CharArgs { u, v } = args;
    let g = params.gamma;
    let nf = f64::from(n);
    if v == ZERO {
        return Ok(exp_difference(nf * g, s1, s2) / u.powu(n));
    }
    let z0 = -u * nf / v;
    // along the path only Re z moves, so a real z0 keeps both ends on the branch
    // cut; the principal value is then a valid antiderivative
    let on_cut = z0.im == 0.0 && z0.re - nf * g * s1 < 0.0;
    let antiderivative = |s: f64| -> Result<Complex64> {
        let w = u + v * (g * s);
        let z = z0 - nf * g * s;
        let mut en = if n == 1 { expint_e1_scaled(z)? } else { expint_en_scaled(n, z)? };
        if on_cut {
            en.im = 0.0;
        }
        Ok(-w.powi(1 - n as i32) * en * (nf * g * s).exp() / (v * g))
    };
    Ok(antiderivative(s2)? - antiderivative(s1)?)
}

/// `∫ (A e^{-γs} + B e^{-βs})^n ds` (`β ≠ γ`) by the binomial sum.
pub fn taylor_term_nondegenerate(n: u32, s1: f64, s2: f64, args: CharArgs, params: &ModelParams) -> Result<Complex64> {
    check_limits(s1, s2)?;
    let CharArgs { u, v } = args;
    let (beta, g) = (params.beta, params.gamma);
    if v == ZERO {
        return Ok(u.powu(n) * exp_difference(-f64::from(n) * beta, s1, s2));
    }
    let a = v * params.f();
    let b = u - a;
    let mut sum = ZERO;
    let mut magnitude = 0.0;
    for j in 0..=n {
        let lambda = -(f64::from(j) * g + f64::from(n - j) * beta);
        let term = a.powu(j) * b.powu(n - j) * (binom(u64::from(n), u64::from(j)) * exp_difference(lambda, s1, s2));
        sum += term;
        magnitude += term.norm();
    }
    if magnitude > MAX_CANCELLATION * sum.norm() || !magnitude.is_finite() {
        // A and B nearly cancel when β is close to γ
        return quadrature_power_integral(n as i32, s1, s2, args, params);
    }
    Ok(sum)
}

/// `∫ (A e^{-γs} + B e^{-βs})^{-n} ds` (`β ≠ γ`).
pub fn laurent_term_nondegenerate(n: u32, s1: f64, s2: f64, args: CharArgs, params: &ModelParams) -> Result<Complex64> {
    check_limits(s1, s2)?;
    let CharArgs { u, v } = args;
    let nf = f64::from(n);
    if v == ZERO {
        return Ok(exp_difference(nf * params.beta, s1, s2) / u.powu(n));
    }
    let a = v * params.f();
    if u - a == ZERO {
        return Ok(exp_difference(nf * params.gamma, s1, s2) / a.powu(n));
    }
    hypergeometric_power_integral(-(n as i32), s1, s2, args, params)
}

/// `∫ U(s)^p ds` (`β ≠ γ`) for any integer `p` through the incomplete beta function.
pub fn hypergeometric_power_integral(
    p: i32,
    s1: f64,
    s2: f64,
    args: CharArgs,
    params: &ModelParams,
) -> Result<Complex64> {
    check_limits(s1, s2)?;
    if params.is_degenerate() {
        return Err(Error::InvalidParameter("hypergeometric route needs beta != gamma".into()));
    }
    if p == 0 {
        return Ok(Complex64::new(constant_term(s1, s2), 0.0));
    }
    let CharArgs { u, v } = args;
    let (beta, g) = (params.beta, params.gamma);
    let d = beta - g;
    let a = v * params.f();
    let b = u - a;
    if a == ZERO || b == ZERO {
        // single exponential
        let (c, rate) = if a == ZERO { (b, beta) } else { (a, g) };
        return Ok(c.powi(p) * exp_difference(-f64::from(p) * rate, s1, s2));
    }
    let fallback = || quadrature_power_integral(p, s1, s2, args, params);
    // |ζ| = |B e^{-βs}| / |A e^{-γs}| is monotone; split where it crosses 1 and
    // put the dominant exponential first on each side
    let cross = (b / a).norm().ln() / d;
    let mut pieces = vec![s1];
    if cross > s1 && cross < s2 {
        pieces.push(cross);
    }
    pieces.push(s2);
    let mut sum = ZERO;
    for w in pieces.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let (lead, rate_lead, tail, rate_tail) =
            if (b / a).norm() * (-d * mid).exp() <= 1.0 { (a, g, b, beta) } else { (b, beta, a, g) };
        match two_exponential_integral(p, w[0], w[1], (lead, rate_lead), (tail, rate_tail)) {
            Some(value) => sum += value,
            None => return fallback(),
        }
    }
    Ok(sum)
}

/// `∫ (a e^{-λ_a s} + b e^{-λ_b s})^p ds` with `|b e^{-λ_b s}| <= |a e^{-λ_a s}|`
/// on the interval; `None` when the closed form is unreliable.
fn two_exponential_integral(
    p: i32,
    s1: f64,
    s2: f64,
    (a, rate_a): (Complex64, f64),
    (b, rate_b): (Complex64, f64),
) -> Option<Complex64> {
    let d = rate_b - rate_a;
    let sigma = f64::from(p) * rate_a / d;
    let zeta0 = -b / a;
    let zeta = |s: f64| zeta0 * (-d * s).exp();
    // A^p e^{-pγs} kept as one well-scaled power
    let lead = |s: f64| (a * (-rate_a * s).exp()).powi(p);
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
    let gap = (sigma - sigma.round()).abs();
    if gap <= INTEGER_SIGMA_EPS * sigma.abs().max(1.0) {
        let k = sigma.round() as i64;
        let (z1, z2) = (zeta(s1), zeta(s2));
        let (r, cond) = rational_beta_terms(k - 1, i64::from(p), z1, z2);
        let value = -lead(s1) * z1.powi(-(k as i32)) * r / d;
        return (cond <= MAX_CANCELLATION && finite(value)).then_some(value);
    }
    if gap < NEAR_INTEGER_SIGMA {
        return None;
    }
    // Euler's transformation 2F1(-p, σ; σ+1; ζ) = (1-ζ)^{1+p} 2F1(1, σ+1+p; σ+1; ζ)
    // keeps the series terms bounded for large |p|
    let bs = Complex64::new(sigma + 1.0 + f64::from(p), 0.0);
    let cs = Complex64::new(sigma + 1.0, 0.0);
    let antiderivative = |s: f64| -> Option<Complex64> {
        let z = zeta(s);
        let y = 1.0 - z;
        let (f, cond) = gauss_2f1_conditioned(1, bs, cs, z).ok()?;
        (cond <= MAX_CANCELLATION).then(|| -lead(s) * y.powi(p) * y * f / (d * sigma))
    };
    let (hi, lo) = (antiderivative(s2)?, antiderivative(s1)?);
    let value = hi - lo;
    let cond = (hi.norm() + lo.norm()) / value.norm();
    (cond <= MAX_CANCELLATION && finite(value)).then_some(value)
}

/// `∫_{z1}^{z2} t^a (1-t)^b dt` along the segment, for integers `a`, `b`.
///
/// The segment must avoid `0` and `1`.
pub fn rational_beta_integral(a: i64, b: i64, z1: Complex64, z2: Complex64) -> Complex64 {
    rational_beta_terms(a, b, z1, z2).0
}

/// The integral together with the ratio of its summed term magnitudes to its value.
fn rational_beta_terms(a: i64, b: i64, z1: Complex64, z2: Complex64) -> (Complex64, f64) {
    let direct = partial_fractions(a, b, z1, z2);
    if z1.norm().min(z2.norm()) <= 1.0 {
        return direct;
    }
    // t = 1/τ maps t^a (1-t)^b dt to -(-1)^b τ^{-a-b-2} (1-τ)^b dτ
    let (value, cond) = partial_fractions(-a - b - 2, b, z1.inv(), z2.inv());
    let flip = if b % 2 == 0 { -1.0 } else { 1.0 };
    if cond < direct.1 {
        (value * flip, cond)
    } else {
        direct
    }
}

fn partial_fractions(a: i64, b: i64, z1: Complex64, z2: Complex64) -> (Complex64, f64) {
    let one = Complex64::new(1.0, 0.0);
    // ∫ t^m dt
    let t_power = |m: i64| -> Complex64 {
        if m == -1 {
            (z2 / z1).ln()
        } else {
            let e = (m + 1) as i32;
            (z2.powi(e) - z1.powi(e)) / (m + 1) as f64
        }
    };
    // ∫ (1-t)^m dt
    let y1 = one - z1;
    let y2 = one - z2;
    let y_power = |m: i64| -> Complex64 {
        if m == -1 {
            -(y2 / y1).ln()
        } else {
            let e = (m + 1) as i32;
            -(y2.powi(e) - y1.powi(e)) / (m + 1) as f64
        }
    };
    let c = |n: i64, k: i64| binom(n as u64, k as u64);
    let sign = |k: i64| if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut terms = Vec::new();
    if b >= 0 {
        for k in 0..=b {
            terms.push(t_power(a + k) * (c(b, k) * sign(k)));
        }
    } else if a >= 0 {
        // t^a = (1 - (1-t))^a
        for k in 0..=a {
            terms.push(y_power(k + b) * (c(a, k) * sign(k)));
        }
    } else {
        let (pa, pb) = (-a, -b);
        for k in 1..=pa {
            terms.push(t_power(-k) * c(pa - k + pb - 1, pa - k));
        }
        for l in 1..=pb {
            terms.push(y_power(-l) * c(pb - l + pa - 1, pb - l));
        }
    }
    let sum: Complex64 = terms.iter().sum();
    let magnitude: f64 = terms.iter().map(|t| t.norm()).sum();
    (sum, magnitude / sum.norm())
}

/// `∫ U(s)^p ds` by the closed form matching the parameter regime.
pub fn power_integral(p: i32, s1: f64, s2: f64, args: CharArgs, params: &ModelParams) -> Result<Complex64> {
    let n = p.unsigned_abs();
    match (p.signum(), params.is_degenerate()) {
        (0, _) => {
            check_limits(s1, s2)?;
            Ok(Complex64::new(constant_term(s1, s2), 0.0))
        }
        (1, true) => taylor_term_degenerate(n, s1, s2, args, params),
        (1, false) => taylor_term_nondegenerate(n, s1, s2, args, params),
        (_, true) => laurent_term_degenerate(n, s1, s2, args, params),
        (_, false) => laurent_term_nondegenerate(n, s1, s2, args, params),
    }
}

/// `∫ U(s)^p ds` by adaptive quadrature.
pub fn quadrature_power_integral(p: i32, s1: f64, s2: f64, args: CharArgs, params: &ModelParams) -> Result<Complex64> {
    check_limits(s1, s2)?;
    let f = |s: f64| eval_u(s, args, params).powi(p);
    let size = [s1, 0.5 * (s1 + s2), s2].iter().map(|&s| f(s).norm()).fold(0.0, f64::max);
    let rate = f64::from(p.unsigned_abs()) * params.beta.max(params.gamma);
    let breaks = quadrature::graded_breaks(s1, s2, 0.25 / rate);
    quadrature::integrate_from(f, &breaks, 1e-13, 1e-14 * size * (s2 - s1))
}

/// `Ω_k ∫ U(s)^{p_k} ds` for coefficient `k` of `series`.
///
/// When the coefficient or the integral overflows, the integral is evaluated
/// for `U / scale` and the factor `scale^p` is folded into `ln |Ω_k|`.
pub fn weighted_power_integral(
    series: &SeriesCoefficients,
    k: usize,
    scale: f64,
    s1: f64,
    s2: f64,
    args: CharArgs,
    params: &ModelParams,
) -> Result<Complex64> {
    let p = series.powers[k];
    let raw = series.coeffs[k];
    if raw.is_finite() {
        let value = power_integral(p, s1, s2, args, params)? * raw;
        if value.re.is_finite() && value.im.is_finite() {
            return Ok(value);
        }
    }
    let scaled = CharArgs::new(args.u / scale, args.v / scale);
    let integral = power_integral(p, s1, s2, scaled, params)?;
    let weight = series.sign[k] * (series.ln_abs[k] + f64::from(p) * scale.ln()).exp();
    let value = integral * weight;
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { op: "weighted_power_integral", detail: format!("power {p} on [{s1}, {s2}]") })
    }
}
