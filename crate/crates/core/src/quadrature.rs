//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Error level that rounding alone produces on this piece.
    floor: f64,
}

impl Piece {
    fn excess(&self) -> f64 {
        (self.error - self.floor).max(0.0)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Piece {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(centre - dx), f(centre + dx));
        let pair = lo + hi;
        k += pair * WGK[j];
        abs += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            g += pair * WG[j / 2];
        }
    }
    Piece { a, b, value: k * half, error: ((k - g) * half).norm(), floor: 50.0 * f64::EPSILON * abs * half.abs() }
}

/// Integrate `f` over `[a, b]` to relative tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    integrate_with(f, a, b, tol, 0.0)
}

/// Integrate `f` over `[a, b]` until the error estimate is below `rel` times the
/// value or below `abs`.
pub fn integrate_with<F: FnMut(f64) -> Complex64>(f: F, a: f64, b: f64, rel: f64, abs: f64) -> Result<Complex64> {
    integrate_from(f, &[a, b], rel, abs)
}

/// As [`integrate_with`], starting from the pieces between consecutive `breaks`.
pub fn integrate_from<F: FnMut(f64) -> Complex64>(mut f: F, breaks: &[f64], rel: f64, abs: f64) -> Result<Complex64> {
    let mut pieces: Vec<Piece> =
        breaks.windows(2).filter(|w| w[0] != w[1]).map(|w| kronrod(&mut f, w[0], w[1])).collect();
    if pieces.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    loop {
        let total: Complex64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let excess: f64 = pieces.iter().map(Piece::excess).sum();
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::Convergence { op: "integrate", detail: "non-finite integrand".into() });
        }
        let magnitude: f64 = pieces.iter().map(|p| p.value.norm()).sum();
        let scale = total.norm().max(magnitude * 1e-3);
        let roundoff = 50.0 * f64::EPSILON * magnitude;
        if error <= rel * scale || error <= abs.max(roundoff).max(1e-300) || excess == 0.0 {
            return Ok(total);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Convergence {
                op: "integrate",
                detail: format!("estimated error {error:e} after {MAX_INTERVALS} intervals"),
            });
        }
        let worst =
            pieces.iter().enumerate().max_by(|x, y| x.1.excess().total_cmp(&y.1.excess())).map(|(i, _)| i).unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            // interval at machine resolution; accept what we have
            return Ok(total);
        }
        pieces.push(kronrod(&mut f, p.a, mid));
        pieces.push(kronrod(&mut f, mid, p.b));
    }
}

/// Breakpoints on `[a, b]` refining geometrically towards both ends, down to `width`.
pub fn graded_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let mut steps = Vec::new();
    let mut h = width;
    while 2.0 * h < 0.5 * (b - a) {
        steps.push(h);
        h *= 2.0;
    }
    let mut out = vec![a];
    out.extend(steps.iter().map(|&h| a + h));
    out.extend(steps.iter().rev().map(|&h| b - h));
    out.push(b);
    out
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, tol).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate_real(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(v, 128.0 / 7.0 - 6.0, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // ∫_0^10 e^{i 5 x} dx = (e^{50 i} - 1) / (5 i)
        let got = integrate(|x| Complex64::new(0.0, 5.0 * x).exp(), 0.0, 10.0, 1e-13).unwrap();
        let want = (Complex64::new(0.0, 50.0).exp() - 1.0) / Complex64::new(0.0, 5.0);
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate_real(|x| x.sqrt().recip(), 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn absolute_tolerance_stops_early() {
        // value is zero, so only the absolute bound can be met
        let v = integrate_with(|x| Complex64::new(x.sin(), 0.0), -1.0, 1.0, 1e-14, 1e-12).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn cancelling_oscillation_stops_at_roundoff() {
        // ∫ e^{i 40 x} over two periods is zero; scaled to sit near underflow of the relative test
        let w = 40.0;
        let f = |x: f64| Complex64::new(0.0, w * x).exp() * 1e-16;
        let v = integrate(f, 0.0, 2.0 * std::f64::consts::TAU / w, 1e-13).unwrap();
        assert!(v.norm() < 1e-28);
    }

    #[test]
    fn narrow_peak_is_found_with_graded_breaks() {
        let f = |x: f64| Complex64::new((-200.0 * x).exp(), 0.0);
        let got = integrate_from(f, &graded_breaks(0.0, 64.0, 1e-3), 1e-13, 0.0).unwrap();
        assert!((got.re - 1.0 / 200.0).abs() < 1e-15);
        let breaks = graded_breaks(0.0, 1.0, 0.1);
        assert!(breaks.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let f = |x: f64| x.exp();
        let a = integrate_real(f, 0.0, 1.0, 1e-14).unwrap();
        let b = integrate_real(f, 1.0, 0.0, 1e-14).unwrap();
        assert_relative_eq!(a, -b, max_relative = 1e-15);
    }
}
