use num_complex::Complex64;
use rand::{Rng, RngCore};

use super::{Atom, JumpComponent, JumpDrawer};
use crate::error::{Error, Result};
use crate::special::cexpm1_minus_id;

/// Compound Poisson jumps with finitely many jump sizes.
#[derive(Debug, Clone)]
pub struct Atoms {
    atoms: Vec<Atom>,
}

impl Atoms {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Config("compound_poisson needs at least one atom".into()));
        }
        for a in &atoms {
            if !(a.intensity > 0.0) || !a.intensity.is_finite() {
                return Err(Error::Config(format!("atom intensity must be positive, got {}", a.intensity)));
            }
            if !a.location.is_finite() || a.location == 0.0 {
                return Err(Error::Config(format!("atom location must be finite and nonzero, got {}", a.location)));
            }
        }
        Ok(Atoms { atoms })
    }

    pub fn single(location: f64, intensity: f64) -> Result<Self> {
        Atoms::new(vec![Atom { location, intensity }])
    }
}

impl JumpComponent for Atoms {
    fn family(&self) -> &'static str {
        "compound_poisson"
    }

    fn support(&self) -> (f64, f64) {
        self.atoms.iter().fold((0.0, 0.0), |(lo, hi), a| (lo.min(a.location), hi.max(a.location)))
    }

    fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn total_mass(&self) -> Option<f64> {
        Some(self.atoms.iter().map(|a| a.intensity).sum())
    }

    fn closed_form_exponent(&self, w: Complex64) -> Option<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        Some(self.atoms.iter().fold(Complex64::new(0.0, 0.0), |acc, a| {
            let iwy = i * w * a.location;
            let term = if a.location.abs() <= 1.0 { cexpm1_minus_id(iwy) } else { iwy.exp() - 1.0 };
            acc + term * a.intensity
        }))
    }

    fn large_jump_sampler(&self, eps: f64) -> Result<Box<dyn JumpDrawer>> {
        let kept: Vec<Atom> = self.atoms.iter().copied().filter(|a| a.location.abs() >= eps).collect();
        let total = kept.iter().map(|a| a.intensity).sum();
        Ok(Box::new(AtomDrawer { atoms: kept, total }))
    }
}

struct AtomDrawer {
    atoms: Vec<Atom>,
    total: f64,
}

impl JumpDrawer for AtomDrawer {
    fn intensity(&self) -> f64 {
        self.total
    }

    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        let mut u = rng.random::<f64>() * self.total;
        for a in &self.atoms {
            if u < a.intensity {
                return a.location;
            }
            u -= a.intensity;
        }
        self.atoms.last().map_or(0.0, |a| a.location)
    }
}
