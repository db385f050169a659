//! Special functions: cancellation-free `e^y - 1 - y`, the complex upper
//! incomplete gamma function, closed forms for truncated one-sided stable
//! integrals, and Black-Scholes put formulas.

use num_complex::Complex64;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

/// `e^y - 1 - y` without cancellation near zero.
pub fn expm1_minus_id(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        let y2 = y * y;
        y2 * (0.5 + y * (1.0 / 6.0 + y * (1.0 / 24.0 + y * (1.0 / 120.0 + y / 720.0))))
    } else {
        y.exp_m1() - y
    }
}

/// Complex variant of [`expm1_minus_id`].
pub fn cexpm1_minus_id(z: Complex64) -> Complex64 {
    if z.norm() < 1e-2 {
        // Taylor series to order 9: |z|^10/10! < 1e-26.
        let mut term = z * z * 0.5;
        let mut sum = term;
        for n in 3..=10 {
            term = term * z / n as f64;
            sum += term;
        }
        sum
    } else {
        z.exp() - 1.0 - z
    }
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `Γ(-α)` for `α ∈ (0, 2)`, `α ≠ 1`.
pub fn gamma_neg(alpha: f64) -> f64 {
    gamma(2.0 - alpha) / (alpha * (alpha - 1.0))
}

/// Upper incomplete gamma `Γ(a, x)` for complex `x` away from the negative
/// real axis, by the Legendre continued fraction (modified Lentz).
pub fn upper_incomplete_gamma_cf(a: f64, x: Complex64) -> Option<Complex64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..20_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = b + d * an;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            return Some((-x + x.ln() * a).exp() * h);
        }
    }
    None
}

/// `F(s) = ∫_0^A (e^{-s z} - 1 + s z) z^{-1-α} dz` for `α ∈ (0, 2)`, `α ≠ 1`,
/// any complex `s`. Returns `None` when neither the power series nor the
/// continued fraction is reliable (large `|s A|` with `Re s < 0`).
pub fn truncated_stable_integral(s: Complex64, alpha: f64, cutoff: f64) -> Option<Complex64> {
    let x = s * cutoff;
    let loss = x.norm() - (-x.re).max(0.0);
    if x.norm() <= 2.0 || (x.re < 0.0 && loss <= 3.0 && x.norm() < 700.0) {
        // A^{-α} Σ_{n≥2} (-x)^n / (n! (n - α))
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        let neg_x = -x;
        for n in 1..2000 {
            term = term * neg_x / n as f64;
            if n >= 2 {
                let add = term / (n as f64 - alpha);
                sum += add;
                if add.norm() <= 1e-17 * sum.norm() && n as f64 > x.norm() {
                    break;
                }
            }
        }
        return Some(sum * cutoff.powf(-alpha));
    }
    if x.re < 0.0 {
        return None;
    }
    let s_alpha = (s.ln() * alpha).exp();
    let upper = upper_incomplete_gamma_cf(-alpha, x)?;
    Some(
        s_alpha * (gamma_neg(alpha) - upper) + cutoff.powf(-alpha) / alpha
            + s * cutoff.powf(1.0 - alpha) / (1.0 - alpha),
    )
}

/// `E[(K - e^{m + √v Z})_+]` for standard normal `Z`; `v = 0` gives the
/// intrinsic value.
pub fn lognormal_put(strike: f64, m: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return (strike - m.exp()).max(0.0);
    }
    let sd = v.sqrt();
    let d2 = (strike.ln() - m) / sd;
    let d1 = d2 - sd;
    strike * norm_cdf(d2) - (m + 0.5 * v).exp() * norm_cdf(d1)
}

/// Black-Scholes European put with continuous dividend yield.
pub fn black_scholes_put(spot: f64, strike: f64, r: f64, delta: f64, sigma: f64, theta: f64) -> f64 {
    if theta <= 0.0 {
        return (strike - spot).max(0.0);
    }
    let v = sigma * sigma * theta;
    let m = spot.ln() + (r - delta) * theta - 0.5 * v;
    (-r * theta).exp() * lognormal_put(strike, m, v)
}
