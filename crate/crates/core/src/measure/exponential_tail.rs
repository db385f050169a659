use num_complex::Complex64;
use rand::{Rng, RngCore};

use super::{JumpComponent, JumpDrawer};
use crate::error::{Error, Result};

/// Finite-activity positive jumps with density `λ β e^{-β y}`, `y > 0`.
#[derive(Debug, Clone)]
pub struct ExponentialTail {
    pub intensity: f64,
    pub rate: f64,
}

impl ExponentialTail {
    pub fn new(intensity: f64, rate: f64) -> Result<Self> {
        if !(intensity > 0.0) {
            return Err(Error::Config(format!("tail intensity must be positive, got {intensity}")));
        }
        if !(rate > 1.0) {
            return Err(Error::Config(format!(
                "tail rate must exceed 1 for ∫ e^y ν(dy) < ∞, got {rate}"
            )));
        }
        Ok(ExponentialTail { intensity, rate })
    }

    /// `∫(e^y - 1) ν(dy) = λ / (β - 1)`.
    pub fn exp_moment(&self) -> f64 {
        self.intensity / (self.rate - 1.0)
    }
}

impl JumpComponent for ExponentialTail {
    fn family(&self) -> &'static str {
        "exponential_tail"
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn density(&self, y: f64) -> f64 {
        if y > 0.0 {
            self.intensity * self.rate * (-self.rate * y).exp()
        } else {
            0.0
        }
    }

    fn has_density(&self) -> bool {
        true
    }

    fn moment_strip(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, self.rate)
    }

    fn total_mass(&self) -> Option<f64> {
        Some(self.intensity)
    }

    fn closed_form_exponent(&self, w: Complex64) -> Option<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let b = self.rate;
        let mean_small = self.intensity * (1.0 - (-b).exp() * (1.0 + b)) / b;
        Some(self.intensity * (b / (b - i * w) - 1.0) - i * w * mean_small)
    }

    fn large_jump_sampler(&self, eps: f64) -> Result<Box<dyn JumpDrawer>> {
        let eps = eps.max(0.0);
        Ok(Box::new(ExpDrawer {
            offset: eps,
            rate: self.rate,
            mass: self.intensity * (-self.rate * eps).exp(),
        }))
    }

    fn truncation(&self, tol: f64) -> (f64, f64) {
        // ∫_Y^∞ e^y λβe^{-βy} dy = λβ/(β-1) e^{-(β-1)Y}
        let b = self.rate;
        let y = ((self.intensity * b / (b - 1.0)) / tol).ln() / (b - 1.0);
        (0.0, y.max(1.0))
    }
}

struct ExpDrawer {
    offset: f64,
    rate: f64,
    mass: f64,
}

impl JumpDrawer for ExpDrawer {
    fn intensity(&self) -> f64 {
        self.mass
    }

    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rng.random();
        self.offset - (1.0 - u).ln() / self.rate
    }
}
