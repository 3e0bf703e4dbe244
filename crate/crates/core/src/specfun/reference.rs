//! High-precision reference for the exponential integral.
//!
//! Sums run in double-double arithmetic (about 32 significant digits); the
//! logarithm and the final `exp(-z)` factor are taken in `f64`, which bounds
//! the reference to roughly `1e-14` relative accuracy. That is six orders of
//! magnitude below the accuracy demanded of [`super::expint_e1`].
//!
//! Two routes are used:
//!
//! - the convergent power series `E1(z) = -γ - ln z + Σ (-1)^{k+1} z^k / (k k!)`
//!   where `|z| <= 2` or `Re sqrt(z) < 1` (the cancellation there is bounded by
//!   `e^2`), and
//! - the continued fraction `e^z E1(z) = 1/(z+1 - 1/(z+3 - 4/(z+5 - ...)))`
//!   evaluated with the modified Lentz method everywhere else.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

const EULER_HI: f64 = 0.577_215_664_901_532_9;
const EULER_LO: f64 = -4.942_915_152_430_645e-18;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, t) = two_sum(self.hi, -p);
        let t = t - e + self.lo;
        let q2 = (s + t) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexDd {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDd {
    pub fn from_c64(z: Complex64) -> Self {
        Self { re: DoubleDouble::from_f64(z.re), im: DoubleDouble::from_f64(z.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn norm_f64(self) -> f64 {
        self.to_c64().norm()
    }

    fn div_f64(self, b: f64) -> Self {
        Self { re: self.re.div_f64(b), im: self.im.div_f64(b) }
    }
}

impl Add for ComplexDd {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for ComplexDd {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for ComplexDd {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl Mul for ComplexDd {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for ComplexDd {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let den = o.re * o.re + o.im * o.im;
        let re = (self.re * o.re + self.im * o.im) / den;
        let im = (self.im * o.re - self.re * o.im) / den;
        Self { re, im }
    }
}

fn use_series(z: Complex64) -> bool {
    z.norm() <= 2.0 || z.sqrt().re < 1.0
}

/// Reference value of `E1(z)` on the principal branch.
///
/// On the negative real axis the sign of the zero imaginary part selects the
/// side of the cut, matching `atan2` conventions.
pub fn e1_reference(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain { op: "e1_reference", detail: "E1 is singular at z = 0".into() });
    }
    if use_series(z) {
        series(z)
    } else {
        Ok((-z).exp() * continued_fraction(z)?)
    }
}

fn series(z: Complex64) -> Result<Complex64> {
    let zd = ComplexDd::from_c64(z);
    let minus_z = -zd;
    let mut term = ComplexDd::from_c64(Complex64::new(1.0, 0.0));
    let mut sum = ComplexDd::default();
    let zn = z.norm();
    for k in 1..=600u32 {
        let kf = f64::from(k);
        term = (term * minus_z).div_f64(kf);
        let contrib = term.div_f64(kf);
        sum = sum - contrib;
        if kf > zn && contrib.norm_f64() <= 1e-33 * sum.norm_f64().max(1e-300) {
            let ln = z.ln();
            let head = ComplexDd {
                re: -(DoubleDouble { hi: EULER_HI, lo: EULER_LO }) - DoubleDouble::from_f64(ln.re),
                im: -DoubleDouble::from_f64(ln.im),
            };
            return Ok((head + sum).to_c64());
        }
    }
    Err(Error::Convergence { op: "e1_reference", detail: format!("series did not converge at z = {z}") })
}

/// `e^z E1(z)` by the modified Lentz algorithm.
fn continued_fraction(z: Complex64) -> Result<Complex64> {
    let tiny = ComplexDd::from_c64(Complex64::new(1e-300, 0.0));
    let one = ComplexDd::from_c64(Complex64::new(1.0, 0.0));
    let zd = ComplexDd::from_c64(z);
    // e^z E1(z) = 1 / g with g = b1 + a2 / (b2 + a3 / (b3 + ...)),
    // b_k = z + 2k - 1, a_k = -(k-1)^2.
    let b1 = zd + one;
    let mut g = b1;
    let mut c = b1;
    let mut d = ComplexDd::default();
    for k in 2..=20_000u32 {
        let kf = f64::from(k);
        let a = ComplexDd { re: DoubleDouble::from_f64(-(kf - 1.0) * (kf - 1.0)), im: DoubleDouble::ZERO };
        let b = zd + ComplexDd::from_c64(Complex64::new(2.0 * kf - 1.0, 0.0));
        let mut dn = b + a * d;
        if dn.norm_f64() < 1e-300 {
            dn = tiny;
        }
        d = one / dn;
        c = b + a / c;
        if c.norm_f64() < 1e-300 {
            c = tiny;
        }
        let delta = c * d;
        g = g * delta;
        if (delta - one).norm_f64() < 1e-32 {
            return Ok((one / g).to_c64());
        }
    }
    Err(Error::Convergence { op: "e1_reference", detail: format!("continued fraction did not converge at z = {z}") })
}
