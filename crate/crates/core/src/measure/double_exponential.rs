use num_complex::Complex64;
use rand::{Rng, RngCore};

use super::{JumpComponent, JumpDrawer};
use crate::error::{Error, Result};

/// Kou double-exponential jumps: intensity `λ`, upward probability `p`,
/// upward rate `η₊ > 1`, downward rate `η₋ > 0`.
#[derive(Debug, Clone)]
pub struct DoubleExponential {
    pub lambda: f64,
    pub p_up: f64,
    pub eta_up: f64,
    pub eta_down: f64,
}

impl DoubleExponential {
    pub fn new(lambda: f64, p_up: f64, eta_up: f64, eta_down: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&p_up) {
            return Err(Error::Config(format!("p must lie in [0, 1], got {p_up}")));
        }
        if p_up > 0.0 && !(eta_up > 1.0) {
            return Err(Error::Config(format!(
                "eta_up must exceed 1 for ∫ e^y ν(dy) < ∞, got {eta_up}"
            )));
        }
        if p_up < 1.0 && !(eta_down > 0.0) {
            return Err(Error::Config(format!("eta_down must be positive, got {eta_down}")));
        }
        Ok(DoubleExponential { lambda, p_up, eta_up, eta_down })
    }

    fn up(&self) -> f64 {
        self.lambda * self.p_up
    }

    fn down(&self) -> f64 {
        self.lambda * (1.0 - self.p_up)
    }
}

/// `∫_0^1 y η e^{-η y} dy`
fn truncated_mean(eta: f64) -> f64 {
    (1.0 - (-eta).exp() * (1.0 + eta)) / eta
}

impl JumpComponent for DoubleExponential {
    fn family(&self) -> &'static str {
        "double_exponential"
    }

    fn support(&self) -> (f64, f64) {
        (
            if self.down() > 0.0 { f64::NEG_INFINITY } else { 0.0 },
            if self.up() > 0.0 { f64::INFINITY } else { 0.0 },
        )
    }

    fn density(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.up() * self.eta_up * (-self.eta_up * y).exp()
        } else if y < 0.0 {
            self.down() * self.eta_down * (self.eta_down * y).exp()
        } else {
            0.0
        }
    }

    fn has_density(&self) -> bool {
        true
    }

    fn moment_strip(&self) -> (f64, f64) {
        (
            if self.down() > 0.0 { -self.eta_down } else { f64::NEG_INFINITY },
            if self.up() > 0.0 { self.eta_up } else { f64::INFINITY },
        )
    }

    fn total_mass(&self) -> Option<f64> {
        Some(self.lambda)
    }

    fn closed_form_exponent(&self, w: Complex64) -> Option<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let mut v = Complex64::new(0.0, 0.0);
        if self.up() > 0.0 {
            v += self.up() * (self.eta_up / (self.eta_up - i * w) - 1.0 - i * w * truncated_mean(self.eta_up));
        }
        if self.down() > 0.0 {
            v += self.down() * (self.eta_down / (self.eta_down + i * w) - 1.0 + i * w * truncated_mean(self.eta_down));
        }
        Some(v)
    }

    fn large_jump_sampler(&self, eps: f64) -> Result<Box<dyn JumpDrawer>> {
        let eps = eps.max(0.0);
        let up = self.up() * (-self.eta_up * eps).exp();
        let down = self.down() * (-self.eta_down * eps).exp();
        Ok(Box::new(DeDrawer { eps, up, down, eta_up: self.eta_up, eta_down: self.eta_down }))
    }

    fn truncation(&self, tol: f64) -> (f64, f64) {
        let hi = if self.up() > 0.0 {
            let b = self.eta_up;
            (((self.up() * b / (b - 1.0)) / tol).ln() / (b - 1.0)).max(1.0)
        } else {
            0.0
        };
        let lo = if self.down() > 0.0 {
            -((self.down() / tol).ln() / self.eta_down).max(1.0)
        } else {
            0.0
        };
        (lo, hi)
    }
}

struct DeDrawer {
    eps: f64,
    up: f64,
    down: f64,
    eta_up: f64,
    eta_down: f64,
}

impl JumpDrawer for DeDrawer {
    fn intensity(&self) -> f64 {
        self.up + self.down
    }

    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        let side: f64 = rng.random::<f64>() * (self.up + self.down);
        let e = -(1.0 - rng.random::<f64>()).ln();
        if side < self.up {
            self.eps + e / self.eta_up
        } else {
            -(self.eps + e / self.eta_down)
        }
    }
}
