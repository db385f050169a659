//! Adaptive Gauss-Kronrod quadrature, endpoint-singular and half-line variants,
//! and a bracketing root finder.
//!
//! All Lévy-measure functionals go through these routines, so they are written
//! for tight relative tolerances (1e-10 and below) rather than speed.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-14,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod = kronrod + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let k = kronrod * h;
    let g = gauss * h;
    (k, (k - g).magnitude())
}

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (r, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, r, e)];
    loop {
        let total = pieces.iter().fold(T::zero(), |acc, p| acc + p.2);
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if !total.is_finite_value() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if err <= tol.abs.max(tol.rel * total.magnitude()) {
            return Ok(total);
        }
        if pieces.len() >= tol.max_intervals {
            // Accept when the remaining error is still small in absolute terms.
            if err <= 1e3 * tol.abs.max(tol.rel * total.magnitude()) {
                return Ok(total);
            }
            return Err(Error::Numerical(format!(
                "quadrature on [{a}, {b}] did not converge: error estimate {err:e}"
            )));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (r1, e1) = gk15(&f, lo, mid);
        let (r2, e2) = gk15(&f, mid, hi);
        pieces.push((lo, mid, r1, e1));
        pieces.push((mid, hi, r2, e2));
    }
}

/// Integrates `h` over `[a, b]` where `h(t)` behaves like `(t - a)^p` near `a`
/// with `p > -1`. The substitution `t = a + (b - a) u^m`, `m = 1/(p + 1)`,
/// turns the leading singular behaviour into a constant.
pub fn integrate_left_singular<T: QuadValue, F: Fn(f64) -> T>(
    h: F,
    p: f64,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<T> {
    if p <= -1.0 {
        return Err(Error::Domain(format!(
            "endpoint exponent {p} is not integrable"
        )));
    }
    let m = 1.0 / (p + 1.0);
    let width = b - a;
    integrate(
        |u: f64| {
            let um = u.powf(m);
            let t = a + width * um;
            // u^(m-1) * u^(m p) == u^0 for the leading term.
            h(t) * (width * m * um / u)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integral of `f` over `[a, +inf)`, via `t = a + s/(1-s)`.
pub fn integrate_to_infinity<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, tol: Tolerance) -> Result<T> {
    integrate(
        |s: f64| {
            let one_minus = 1.0 - s;
            f(a + s / one_minus) * (1.0 / (one_minus * one_minus))
        },
        0.0,
        1.0,
        tol,
    )
}

/// Brent's method on a sign-changing bracket `[a, b]`.
pub fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "root not bracketed: f({a}) = {fa:e}, f({b}) = {fb:e}"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1 * xm.signum() };
        fb = f(b);
    }
    Err(Error::Numerical("Brent iteration cap reached".into()))
}
