//! First-order exponential integral `E1(z)` on the principal branch.
//!
//! The plane is split into six regions, each served by a fixed-order kernel.
//! Dispatch takes the first region whose predicate matches, in this order:
//!
//! 1. exterior of `((x/17) + 0.3824)^2 + (y/13)^2 = 1`: continued fraction of depth 6
//! 2. exterior of `((x+10)/15)^2 + (y/9.5)^2 = 1`: continued fraction of depth 10
//! 3. interior of `((x+0.65)/4.05)^2 + (y/4)^2 = 1`: `[10/10]` Padé approximant of `Ein`
//! 4. interior of `((x+4.5)/4.5)^2 + (y/2.3)^2 = 1`: Chebyshev series of `Ein` on `[-9, 0]`
//! 5. wedge `x < -8, |y| < 0.5294 (-x-8)`: Chebyshev series of `x e^x Ein(x)` on `[-35, -8]`
//! 6. everything else: 55-term Maclaurin series
//!
//! Here `Ein(z) = E1(z) + γ + ln z` is entire. The continued fractions are the
//! diagonal Padé approximants of `e^z E1(z)` in `1/z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EULER: f64 = 0.577_215_664_901_532_9;

/// Approximation region of the complex plane used by [`expint_e1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum E1Region {
    Pade6Exterior,
    Pade10Exterior,
    Pade10Ellipse,
    Cheb20Ellipse1,
    Cheb20Radial,
    Taylor55Annulus,
}

impl E1Region {
    pub const ALL: [E1Region; 6] = [
        E1Region::Pade6Exterior,
        E1Region::Pade10Exterior,
        E1Region::Pade10Ellipse,
        E1Region::Cheb20Ellipse1,
        E1Region::Cheb20Radial,
        E1Region::Taylor55Annulus,
    ];

    /// Short label used in benchmark output (`pade1`, `pade2`, `pade3`, `cheb1`, `cheb2`, `taylor`).
    pub fn label(self) -> &'static str {
        match self {
            E1Region::Pade6Exterior => "pade1",
            E1Region::Pade10Exterior => "pade2",
            E1Region::Pade10Ellipse => "pade3",
            E1Region::Cheb20Ellipse1 => "cheb1",
            E1Region::Cheb20Radial => "cheb2",
            E1Region::Taylor55Annulus => "taylor",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.label() == label)
    }

    /// Membership predicate of this region alone, ignoring dispatch priority.
    pub fn contains(self, z: Complex64) -> bool {
        let (x, y) = (z.re, z.im);
        match self {
            E1Region::Pade6Exterior => (x / 17.0 + 0.3824).powi(2) + (y / 13.0).powi(2) > 1.0,
            E1Region::Pade10Exterior => ((x + 10.0) / 15.0).powi(2) + (y / 9.5).powi(2) > 1.0,
            E1Region::Pade10Ellipse => ((x + 0.65) / 4.05).powi(2) + (y / 4.0).powi(2) < 1.0,
            E1Region::Cheb20Ellipse1 => ((x + 4.5) / 4.5).powi(2) + (y / 2.3).powi(2) < 1.0,
            E1Region::Cheb20Radial => x < -8.0 && y.abs() < (-x - 8.0) * 0.5294,
            E1Region::Taylor55Annulus => true,
        }
    }
}

/// Region selected for `z`: the first matching predicate in priority order.
pub fn e1_region(z: Complex64) -> E1Region {
    E1Region::ALL.into_iter().find(|r| r.contains(z)).unwrap_or(E1Region::Taylor55Annulus)
}

/// `E1(z) = ∫_z^∞ e^{-t}/t dt`, principal branch.
pub fn expint_e1(z: Complex64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain { op: "expint_e1", detail: "E1 is singular at z = 0".into() });
    }
    Ok(match e1_region(z) {
        E1Region::Pade6Exterior => (-z).exp() * continued_fraction(z, 6),
        E1Region::Pade10Exterior => (-z).exp() * continued_fraction(z, 10),
        region => log_part(z) + entire_part(z, region),
    })
}

/// `e^z E1(z)`, finite wherever `E1` would overflow or underflow alone.
pub fn expint_e1_scaled(z: Complex64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain { op: "expint_e1_scaled", detail: "E1 is singular at z = 0".into() });
    }
    Ok(match e1_region(z) {
        E1Region::Pade6Exterior => continued_fraction(z, 6),
        E1Region::Pade10Exterior => continued_fraction(z, 10),
        E1Region::Cheb20Radial => {
            let w = (z + 21.5) / 13.5;
            z.exp() * log_part(z) + clenshaw(&CHEB_RADIAL, w) / z
        }
        region => z.exp() * (log_part(z) + entire_part(z, region)),
    })
}

/// Generalized exponential integral `E_n(z)` for `n >= 1`, built from `E1`.
pub fn expint_en(n: u32, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain { op: "expint_en", detail: "order must be at least 1".into() });
    }
    let e1 = expint_e1(z)?;
    if n == 1 {
        return Ok(e1);
    }
    // E_n(z) = (-z)^{n-1}/(n-1)! E1(z) + e^{-z}/(n-1)! Σ_{k=0}^{n-2} (n-k-2)! (-z)^k
    let mut fact = 1.0; // (n-1)!
    for k in 1..n {
        fact *= f64::from(k);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for k in 0..=(n - 2) {
        let mut f = 1.0;
        for j in 1..=(n - k - 2) {
            f *= f64::from(j);
        }
        sum += power * f;
        power *= -z;
    }
    Ok(((-z).powu(n - 1) * e1 + (-z).exp() * sum) / fact)
}

/// `e^z E_n(z)` for `n >= 1`, without the cancellation of the `E1` recurrence.
///
/// `n = 1` uses the region kernels; higher orders use the power series near
/// the negative real axis and the origin, the asymptotic series far out along
/// that axis and the continued fraction elsewhere.
pub fn expint_en_scaled(n: u32, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain { op: "expint_en_scaled", detail: "order must be at least 1".into() });
    }
    if n == 1 {
        return expint_e1_scaled(z);
    }
    let r = z.norm();
    if r == 0.0 {
        return Ok(Complex64::new(1.0 / f64::from(n - 1), 0.0));
    }
    if r + z.re < 6.0 && r < 60.0 {
        Ok(z.exp() * en_series(n, z))
    } else if r >= 60.0 && z.re < 0.0 && z.im.abs() < -z.re {
        Ok(en_asymptotic(n, z))
    } else {
        en_continued_fraction(n, z)
    }
}

fn en_series(n: u32, z: Complex64) -> Complex64 {
    let m = n - 1;
    let mut psi = -EULER;
    for k in 1..=m {
        psi += 1.0 / f64::from(k);
    }
    let mut term = Complex64::new(1.0, 0.0); // (-z)^k / k!
    let mut head = Complex64::new(0.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..400u32 {
        if k == m {
            head = term * (psi - z.ln());
        } else {
            let add = term / (f64::from(k) - f64::from(m));
            sum += add;
            if k > m && add.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        term = term * -z / f64::from(k + 1);
    }
    head - sum
}

fn en_asymptotic(n: u32, z: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) / z;
    let mut term = w;
    let mut sum = w;
    for k in 0..200u32 {
        let next = -term * w * f64::from(n + k);
        if next.norm() >= term.norm() || next.norm() <= 1e-17 * sum.norm() {
            break;
        }
        sum += next;
        term = next;
    }
    sum
}

fn en_continued_fraction(n: u32, z: Complex64) -> Result<Complex64> {
    let tiny = 1e-300;
    let nf = f64::from(n);
    let mut b = z + nf;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..20_000u32 {
        let an = -f64::from(i) * (nf - 1.0 + f64::from(i));
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * an + b);
        c = b + an / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::Convergence { op: "expint_en_scaled", detail: format!("continued fraction at z = {z}") })
}

fn log_part(z: Complex64) -> Complex64 {
    -z.ln() - EULER
}

/// `Ein(z)` for the regions served by series and Chebyshev kernels.
fn entire_part(z: Complex64, region: E1Region) -> Complex64 {
    match region {
        E1Region::Pade10Ellipse => horner(&PADE_ELLIPSE_NUM, z) / horner(&PADE_ELLIPSE_DEN, z),
        E1Region::Cheb20Ellipse1 => clenshaw(&CHEB_ELLIPSE, (z + 4.5) / 4.5),
        E1Region::Cheb20Radial => clenshaw(&CHEB_RADIAL, (z + 21.5) / 13.5) * (-z).exp() / z,
        _ => maclaurin(z, 55),
    }
}

fn continued_fraction(z: Complex64, depth: u32) -> Complex64 {
    let mut t = z + f64::from(2 * depth + 1);
    for k in (1..=depth).rev() {
        let kf = f64::from(k);
        t = z + (2.0 * kf - 1.0) - kf * kf / t;
    }
    t.inv()
}

fn maclaurin(z: Complex64, terms: u32) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=terms {
        let kf = f64::from(k);
        term *= -z / kf;
        sum -= term / kf;
    }
    sum
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn clenshaw(coeffs: &[f64], w: Complex64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &c in coeffs[1..].iter().rev() {
        let b0 = 2.0 * w * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    w * b1 - b2 + coeffs[0]
}

// Coefficient tables, ascending order. Generated at 40 significant digits.
const PADE_ELLIPSE_NUM: [f64; 11] = [
    0.0,
    1.0,
    0.2685463379663074,
    0.051983945083971125,
    0.005866901928927395,
    0.0004914758217559062,
    2.9743267268990017e-05,
    1.2727662282273993e-06,
    4.098806752755106e-08,
    7.63476033908259e-10,
    9.293089066455605e-12,
];
const PADE_ELLIPSE_DEN: [f64; 11] = [
    1.0,
    0.5185463379663074,
    0.12606497401999242,
    0.018991682213575087,
    0.001970644394521357,
    0.00014772530716882567,
    8.134785232535328e-06,
    3.263448624654997e-07,
    9.171731551594626e-09,
    1.639380038318842e-10,
    1.423814728169985e-12,
];
const CHEB_ELLIPSE: [f64; 24] = [
    -219.51775429386404,
    374.62251395468445,
    -240.06356837243757,
    122.69669152518532,
    -51.79668134335605,
    18.562835736613625,
    -5.768895264364345,
    1.5809175167777683,
    -0.38717955380503827,
    0.08567370766921663,
    -0.017284133692720353,
    0.003203458891229825,
    -0.0005490062664836272,
    8.748738822483558e-05,
    -1.302657578134877e-05,
    1.820031996057411e-06,
    -2.395102270436075e-07,
    2.97863868472479e-08,
    -3.5112415634793494e-09,
    3.933901910321672e-10,
    -4.1991926194022304e-11,
    4.280068920553299e-12,
    -4.174052007232184e-13,
    3.9020524884740607e-14,
];
const CHEB_RADIAL: [f64; 36] = [
    1.0729511397820082,
    0.06024892609807733,
    0.02495613244457514,
    0.010248394717807396,
    0.004094882963714175,
    0.0015481525660366445,
    0.0005295796529671688,
    0.00014914160070622759,
    2.3749412708154245e-05,
    -8.10104006300777e-06,
    -1.0691309864231692e-05,
    -6.959754989211027e-06,
    -3.5591562200807372e-06,
    -1.5653181935892496e-06,
    -6.100892604241894e-07,
    -2.1245211479232268e-07,
    -6.56432450599797e-08,
    -1.7482283608154438e-08,
    -3.6688142461372042e-09,
    -3.820949793196332e-10,
    1.5155101901287125e-10,
    1.3053029445819482e-10,
    6.297888681020097e-11,
    2.467175446040701e-11,
    8.55055365777197e-12,
    2.714176526986234e-12,
    8.033668084283555e-13,
    2.2412024270704106e-13,
    5.935035305488152e-14,
    1.4994626534593675e-14,
    3.628018966873447e-15,
    8.431832710909645e-16,
    1.8868910177524672e-16,
    4.074028113717231e-17,
    8.501679477159401e-18,
    1.7172824316688381e-18,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::reference::e1_reference;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn region_examples() {
        assert_eq!(e1_region(Complex64::new(30.0, 0.0)), E1Region::Pade6Exterior);
        assert_eq!(e1_region(Complex64::new(-0.65, 0.0)), E1Region::Pade10Ellipse);
        assert_eq!(e1_region(Complex64::new(-20.0, 0.1)), E1Region::Cheb20Radial);
        assert_eq!(e1_region(Complex64::new(-4.5, 2.0)), E1Region::Cheb20Ellipse1);
        assert_eq!(e1_region(Complex64::new(8.0, 0.0)), E1Region::Pade10Exterior);
        assert_eq!(e1_region(Complex64::new(-18.0, 7.5)), E1Region::Taylor55Annulus);
    }

    #[test]
    fn every_kernel_matches_reference_inside_its_region() {
        let mut worst = [0.0f64; 6];
        let mut seen = [0usize; 6];
        let n = 141;
        for i in 0..n {
            for j in 0..n {
                let x = -35.0 + 70.0 * i as f64 / (n - 1) as f64 + 1e-3;
                let y = -35.0 + 70.0 * j as f64 / (n - 1) as f64 + 1e-3;
                let z = Complex64::new(x, y);
                let r = e1_region(z);
                let k = E1Region::ALL.iter().position(|&q| q == r).unwrap();
                let err = rel(expint_e1(z).unwrap(), e1_reference(z).unwrap());
                worst[k] = worst[k].max(err);
                seen[k] += 1;
            }
        }
        for k in 0..6 {
            assert!(seen[k] > 0, "region {:?} never sampled", E1Region::ALL[k]);
            assert!(worst[k] < 1e-8, "region {:?}: max rel err {:e}", E1Region::ALL[k], worst[k]);
        }
    }

    #[test]
    fn scaled_form_is_consistent() {
        for &(x, y) in &[(0.5, 0.5), (-4.0, 1.0), (-20.0, 1.0), (-15.0, 8.0), (12.0, -3.0), (-30.0, 0.3), (3.0, 6.0)] {
            let z = Complex64::new(x, y);
            let scaled = expint_e1_scaled(z).unwrap();
            let direct = z.exp() * expint_e1(z).unwrap();
            assert!(rel(scaled, direct) < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn real_positive_arguments_have_zero_imaginary_part() {
        for &x in &[0.01, 0.7, 3.0, 9.0, 30.0] {
            assert_eq!(expint_e1(Complex64::new(x, 0.0)).unwrap().im, 0.0);
        }
        let e1 = expint_e1(Complex64::new(1.0, 0.0)).unwrap();
        assert!((e1.re - 0.219_383_934_395_520_27).abs() < 1e-15);
    }

    #[test]
    fn conjugate_symmetry() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let z = Complex64::new(70.0 * next() - 35.0, 35.0 * next() + 1e-6);
            let a = expint_e1(z.conj()).unwrap();
            let b = expint_e1(z).unwrap().conj();
            assert!(rel(a, b) < 1e-15, "z = {z}");
        }
    }

    #[test]
    fn second_order_identity() {
        for &(x, y) in &[(0.3, 0.2), (2.0, -1.0), (-3.0, 4.0), (10.0, 10.0), (-20.0, 2.0)] {
            let z = Complex64::new(x, y);
            let e2 = expint_en(2, z).unwrap();
            let want = (-z).exp() - z * expint_e1(z).unwrap();
            assert!(rel(e2, want) < 1e-8, "z = {z}");
        }
    }

    #[test]
    fn higher_orders_satisfy_recurrence() {
        // n E_{n+1}(z) = e^{-z} - z E_n(z)
        let z = Complex64::new(1.5, 0.7);
        for n in 1..6 {
            let lhs = expint_en(n + 1, z).unwrap() * f64::from(n);
            let rhs = (-z).exp() - z * expint_en(n, z).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "n = {n}");
        }
    }

    fn en_from_reference(n: u32, z: Complex64) -> Complex64 {
        // E_n = [(-z)^{n-1} E1 + e^{-z} Σ_{k<n-1} (n-k-2)! (-z)^k] / (n-1)!, scaled by e^z
        let e1s = z.exp() * e1_reference(z).unwrap();
        let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..n - 1 {
            sum += (-z).powu(k) * fact(n - k - 2);
        }
        ((-z).powu(n - 1) * e1s + sum) / fact(n - 1)
    }

    #[test]
    fn scaled_en_against_reference_identity() {
        for n in 2..=6 {
            for &(x, y) in &[(0.3, 0.1), (-1.5, 2.0), (3.0, -4.0), (-8.0, 0.5), (6.0, 1.0), (-4.0, -6.0), (1.0, 9.0)] {
                let z = Complex64::new(x, y);
                let got = expint_en_scaled(n, z).unwrap();
                let want = en_from_reference(n, z);
                assert!(rel(got, want) < 1e-11, "n = {n}, z = {z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn scaled_en_satisfies_recurrence_everywhere() {
        // n E_{n+1} = e^{-z} - z E_n, scaled by e^z
        for &(x, y) in &[
            (-70.0, 0.0),
            (-70.0, 20.0),
            (-45.0, 30.0),
            (-100.0, 3.0),
            (50.0, -80.0),
            (200.0, 0.0),
            (-20.0, 0.0),
            (-5.0, 25.0),
            (2.0, 0.0),
        ] {
            let z = Complex64::new(x, y);
            for n in 2..12 {
                let lhs = expint_en_scaled(n + 1, z).unwrap() * f64::from(n);
                let rhs = 1.0 - z * expint_en_scaled(n, z).unwrap();
                assert!(
                    (lhs - rhs).norm() < 1e-10 * lhs.norm().max(rhs.norm()).max(1e-3),
                    "n = {n}, z = {z}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn scaled_en_against_laplace_quadrature() {
        // E_n(z) = ∫_1^∞ e^{-z t} t^{-n} dt for Re z > 0; substitute t = 1/x
        for n in 2..6 {
            for &(x, y) in &[(0.5, 0.0), (2.0, 3.0), (10.0, -1.0), (0.7, 12.0)] {
                let z = Complex64::new(x, y);
                let f = |s: f64| {
                    if s == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        (-z * (1.0 / s - 1.0)).exp() * s.powi(n as i32 - 2)
                    }
                };
                let want = crate::quadrature::integrate(f, 0.0, 1.0, 1e-13).unwrap();
                let got = expint_en_scaled(n, z).unwrap();
                assert!(rel(got, want) < 1e-10, "n = {n}, z = {z}");
            }
        }
    }

    #[test]
    fn origin_is_rejected() {
        assert!(expint_e1(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for r in E1Region::ALL {
            assert_eq!(E1Region::from_label(r.label()), Some(r));
        }
    }
}
