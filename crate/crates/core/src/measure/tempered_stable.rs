use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore};

use super::{JumpComponent, JumpDrawer, StableNegativePart};
use crate::error::{Error, Result};
use crate::special::truncated_stable_integral;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The bounded factor `η` in the density `η(y)/|y|^{1+α}`.
#[derive(Clone)]
pub enum EtaProfile {
    Constant(f64),
    /// A bounded Borel `η` with `η(0⁻) = eta0`; `sup(a)` must return
    /// `sup_{u ∈ (a, 0)} η(u)`.
    Custom { eta0: f64, eta: RealFn, sup: RealFn },
}

impl fmt::Debug for EtaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaProfile::Constant(v) => write!(f, "Constant({v})"),
            EtaProfile::Custom { eta0, .. } => write!(f, "Custom {{ eta0: {eta0} }}"),
        }
    }
}

impl EtaProfile {
    pub fn eta0(&self) -> f64 {
        match self {
            EtaProfile::Constant(v) => *v,
            EtaProfile::Custom { eta0, .. } => *eta0,
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            EtaProfile::Constant(v) => *v,
            EtaProfile::Custom { eta, .. } => eta(y),
        }
    }

    pub fn sup_on(&self, a: f64) -> f64 {
        match self {
            EtaProfile::Constant(v) => *v,
            EtaProfile::Custom { sup, .. } => sup(a),
        }
    }
}

/// Negative jumps with density `η(y)/|y|^{1+α}` on `(a0, 0)`.
///
/// For `1 < α < 2` this is the small-jump shape under which the gap `K - b(θ)`
/// scales like `θ^{1/α} |ln θ|^{1-1/α}`. `α < 1` gives an infinite-activity
/// finite-variation measure.
#[derive(Debug, Clone)]
pub struct TemperedStableNegative {
    pub alpha: f64,
    pub eta: EtaProfile,
    pub a0: f64,
}

impl TemperedStableNegative {
    pub fn new(alpha: f64, eta: EtaProfile, a0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 2), got {alpha}")));
        }
        if !(a0 < 0.0) || !a0.is_finite() {
            return Err(Error::Config(format!("a0 must be finite and negative, got {a0}")));
        }
        if !(eta.eta0() > 0.0) {
            return Err(Error::Config(format!("eta0 must be positive, got {}", eta.eta0())));
        }
        Ok(TemperedStableNegative { alpha, eta, a0 })
    }

    pub fn constant(alpha: f64, eta0: f64, a0: f64) -> Result<Self> {
        Self::new(alpha, EtaProfile::Constant(eta0), a0)
    }

    fn cutoff(&self) -> f64 {
        -self.a0
    }
}

impl JumpComponent for TemperedStableNegative {
    fn family(&self) -> &'static str {
        "tempered_stable_negative"
    }

    fn support(&self) -> (f64, f64) {
        (self.a0, 0.0)
    }

    fn density(&self, y: f64) -> f64 {
        if y < 0.0 && y > self.a0 {
            self.eta.eval(y) * (-y).powf(-1.0 - self.alpha)
        } else {
            0.0
        }
    }

    fn has_density(&self) -> bool {
        true
    }

    fn singular_index(&self) -> Option<f64> {
        Some(self.alpha)
    }

    fn total_mass(&self) -> Option<f64> {
        None
    }

    fn closed_form_exponent(&self, w: Complex64) -> Option<Complex64> {
        let EtaProfile::Constant(eta0) = self.eta else {
            return None;
        };
        if (self.alpha - 1.0).abs() < 1e-6 {
            return None;
        }
        // y = -z: e^{iwy} - 1 - iwy = e^{-sz} - 1 + sz with s = iw.
        let s = Complex64::new(0.0, 1.0) * w;
        let a = self.cutoff();
        let mut v = truncated_stable_integral(s, self.alpha, a)?;
        if a > 1.0 {
            // compensation only acts on |y| ≤ 1
            v -= s * (a.powf(1.0 - self.alpha) - 1.0) / (1.0 - self.alpha);
        }
        Some(v * eta0)
    }

    fn large_jump_sampler(&self, eps: f64) -> Result<Box<dyn JumpDrawer>> {
        if !(eps > 0.0) {
            return Err(Error::Config("infinite-activity measure needs a positive jump cutoff".into()));
        }
        let a = self.cutoff();
        let alpha = self.alpha;
        if eps >= a {
            return Ok(Box::new(PowerDrawer { lo: a, hi: a, alpha, mass: 0.0, envelope: 1.0, eta: self.eta.clone() }));
        }
        let envelope = self.eta.sup_on(self.a0);
        let mass_env = envelope * (eps.powf(-alpha) - a.powf(-alpha)) / alpha;
        let mass = match self.eta {
            EtaProfile::Constant(_) => mass_env,
            EtaProfile::Custom { .. } => crate::quadrature::integrate(
                |z: f64| self.eta.eval(-z) * z.powf(-1.0 - alpha),
                eps,
                a,
                crate::quadrature::Tolerance::new(1e-14, 1e-12),
            )?,
        };
        Ok(Box::new(PowerDrawer { lo: eps, hi: a, alpha, mass, envelope, eta: self.eta.clone() }))
    }

    fn stable_part(&self) -> Option<StableNegativePart> {
        if self.alpha > 1.0 && self.alpha < 2.0 {
            let eta = self.eta.clone();
            Some(StableNegativePart {
                alpha: self.alpha,
                eta0: self.eta.eta0(),
                a0: self.a0,
                eta_sup: Arc::new(move |a| eta.sup_on(a)),
            })
        } else {
            None
        }
    }
}

/// Inverse-CDF sampling of `z^{-1-α}` on `[lo, hi]`, thinned by `η/envelope`.
struct PowerDrawer {
    lo: f64,
    hi: f64,
    alpha: f64,
    mass: f64,
    envelope: f64,
    eta: EtaProfile,
}

impl JumpDrawer for PowerDrawer {
    fn intensity(&self) -> f64 {
        self.mass
    }

    fn draw(&self, rng: &mut dyn RngCore) -> f64 {
        let lo_p = self.lo.powf(-self.alpha);
        let hi_p = self.hi.powf(-self.alpha);
        loop {
            let u: f64 = rng.random();
            let z = (lo_p - u * (lo_p - hi_p)).powf(-1.0 / self.alpha);
            match self.eta {
                EtaProfile::Constant(_) => return -z,
                EtaProfile::Custom { .. } => {
                    if rng.random::<f64>() * self.envelope <= self.eta.eval(-z) {
                        return -z;
                    }
                }
            }
        }
    }
}
