use num_complex::Complex64;
use rand::{Rng, RngCore};

use super::{JumpComponent, JumpDrawer};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

/// Variance-gamma type measure `c e^{-g|y|}/|y|` for `y < 0` and
/// `c e^{-m y}/y` for `y > 0`: infinite activity, finite variation.
#[derive(Debug, Clone)]
pub struct GammaLike {
    pub c: f64,
    pub g: f64,
    pub m: f64,
}

impl GammaLike {
    pub fn new(c: f64, g: f64, m: f64) -> Result<Self> {
        if !(c > 0.0) || !(g > 0.0) {
            return Err(Error::Config(format!("gamma_like needs c > 0 and g > 0, got c={c}, g={g}")));
        }
        if !(m > 1.0) {
            return Err(Error::Config(format!(
                "gamma_like needs m > 1 for ∫ e^y ν(dy) < ∞, got {m}"
            )));
        }
        Ok(GammaLike { c, g, m })
    }
}

impl JumpComponent for GammaLike {
    fn family(&self) -> &'static str {
        "gamma_like"
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    fn density(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.c * (-self.m * y).exp() / y
        } else if y < 0.0 {
            self.c * (self.g * y).exp() / -y
        } else {
            0.0
        }
    }

    fn has_density(&self) -> bool {
        true
    }

    fn singular_index(&self) -> Option<f64> {
        Some(0.0)
    }

    fn moment_strip(&self) -> (f64, f64) {
        (-self.g, self.m)
    }

    fn total_mass(&self) -> Option<f64> {
        None
    }

    fn closed_form_exponent(&self, w: Complex64) -> Option<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let mean_small = self.c * ((1.0 - (-self.m).exp()) / self.m - (1.0 - (-self.g).exp()) / self.g);
        let up = (1.0 - i * w / self.m).ln();
        let down = (1.0 + i * w / self.g).ln();
        Some(-self.c * (up + down) - i * w * mean_small)
    }

    fn large_jump_sampler(&self, eps: f64) -> Result<Box<dyn JumpDrawer>> {
        if !(eps > 0.0) {
            return Err(Error::Config("infinite-activity measure needs a positive jump cutoff".into()));
        }
        let tol = Tolerance::new(1e-15, 1e-12);
        let side = |rate: f64| -> Result<(f64, f64)> {
            // split at z = max(eps, 1): log-uniform proposal below, exponential above
            let knee = eps.max(1.0);
            let inner = if eps < knee { integrate(|z: f64| (-rate * z).exp() / z, eps, knee, tol)? } else { 0.0 };
            let outer = integrate_to_infinity(|z: f64| (-rate * z).exp() / z, knee, tol)?;
            Ok((self.c * inner, self.c * outer))
        };
        let (up_in, up_out) = side(self.m)?;
        let (dn_in, dn_out) = side(self.g)?;
        Ok(Box::new(GammaDrawer {
            eps,
            knee: eps.max(1.0),
            masses: [up_in, up_out, dn_in, dn_out],
            rates: [self.m, self.g],
        }))
    }

    fn truncation(&self, tol: f64) -> (f64, f64) {
        let b = self.m;
        let hi = ((self.c / ((b - 1.0) * tol)).ln() / (b - 1.0)).max(1.0);
        let lo = -((self.c / (self.g * tol)).ln() / self.g).max(1.0);
        (lo, hi)
    }
}

struct GammaDrawer {
    eps: f64,
    knee: f64,
    masses: [f64; 4],
    rates: [f64; 2],
}

impl GammaDrawer {
    fn inner(&self, rate: f64, rng: &mut dyn RngCore) -> f64 {
        // proposal ∝ 1/z on [eps, knee], accept with e^{-rate (z - eps)}
        let span = (self.knee / self.eps).ln();
        loop {
            let z = self.eps * (span * rng.random::<f64>()).exp();
            if rng.random::<f64>() <= (-rate * (z - self.eps)).exp() {
                return z;
            }
        }
    }

    fn outer(&self, rate: f64, rng: &mut dyn RngCore) -> f64 {
        // proposal knee + Exp(rate), accept with knee / z
        loop {
            let z = self.knee - (1.0 - rng.random::<f64>()).ln() / rate;
            if rng.random::<f64>() <= self.knee / z {
                return z;
            }
        }
    }
}

impl JumpDrawer for GammaDrawer {
    fn intensity(&self) -> f64 {
        self.masses.iter().sum()
    }

    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        let mut u = rng.random::<f64>() * self.intensity();
        let mut pick = 3;
        for (k, m) in self.masses.iter().enumerate() {
            if u < *m {
                pick = k;
                break;
            }
            u -= m;
        }
        match pick {
            0 => self.inner(self.rates[0], rng),
            1 => self.outer(self.rates[0], rng),
            2 => -self.inner(self.rates[1], rng),
            _ => -self.outer(self.rates[1], rng),
        }
    }
}
