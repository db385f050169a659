//! Lévy measures as sums of parametric components.
//!
//! Each family implements [`JumpComponent`] and is registered by name in
//! [`registry`], so model definitions can select families at runtime. A
//! [`JumpMeasure`] is the sum of its components; every functional of ν used
//! elsewhere in the crate (martingale drift, exponential moments, φ₀,
//! small-jump variance) is an integral evaluated here.

mod atoms;
mod double_exponential;
mod exponential_tail;
mod gamma_like;
pub mod registry;
mod tempered_stable;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_left_singular, integrate_to_infinity, Tolerance};
use crate::special::cexpm1_minus_id;

pub use atoms::Atoms;
pub use double_exponential::DoubleExponential;
pub use exponential_tail::ExponentialTail;
pub use gamma_like::GammaLike;
pub use tempered_stable::{EtaProfile, TemperedStableNegative};

/// A point mass of ν: jump size `location` (log-return) arriving at rate `intensity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub intensity: f64,
}

/// The part of a measure that has the one-sided stable shape required for the
/// tempered-stable boundary rate: density `η(y)/|y|^{1+α}` on `(a0, 0)`.
#[derive(Clone)]
pub struct StableNegativePart {
    pub alpha: f64,
    pub eta0: f64,
    pub a0: f64,
    /// `a ↦ sup_{u ∈ (a, 0)} η(u)` for `a ∈ [a0, 0)`.
    pub eta_sup: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for StableNegativePart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StableNegativePart")
            .field("alpha", &self.alpha)
            .field("eta0", &self.eta0)
            .field("a0", &self.a0)
            .finish()
    }
}

/// Draws jumps of absolute size at least `eps` from one component.
pub trait JumpDrawer: Send + Sync {
    /// `ν({|y| ≥ eps})` for this component.
    fn intensity(&self) -> f64;
    fn draw(&self, rng: &mut dyn RngCore) -> f64;
}

pub trait JumpComponent: fmt::Debug + Send + Sync {
    fn family(&self) -> &'static str;

    /// Closed hull of the support.
    fn support(&self) -> (f64, f64);

    /// Lebesgue density of the absolutely continuous part.
    fn density(&self, _y: f64) -> f64 {
        0.0
    }

    fn has_density(&self) -> bool {
        false
    }

    fn atoms(&self) -> &[Atom] {
        &[]
    }

    /// `β` such that the density behaves like `|y|^{-1-β}` at zero; `None` if
    /// the density stays bounded there.
    fn singular_index(&self) -> Option<f64> {
        None
    }

    /// `ν(ℝ)`, or `None` when infinite.
    fn total_mass(&self) -> Option<f64>;

    /// `∫(e^{iwy} - 1 - iwy 1_{|y|≤1}) ν(dy)` when a closed form is available.
    fn closed_form_exponent(&self, _w: Complex64) -> Option<Complex64> {
        None
    }

    fn large_jump_sampler(&self, eps: f64) -> Result<Box<dyn JumpDrawer>>;

    fn stable_part(&self) -> Option<StableNegativePart> {
        None
    }

    /// Open interval of `p` with `∫_{|y|>1} e^{py} ν(dy) < ∞`.
    fn moment_strip(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Declared finite truncation of unbounded tails, used for operator
    /// stencils: returns `(lo, hi)` outside of which the component's
    /// contribution to `∫ e^{max(y,0)} ν(dy)` is below `tol`.
    fn truncation(&self, _tol: f64) -> (f64, f64) {
        self.support()
    }
}

/// Sum of jump components. An empty list is the zero measure.
#[derive(Debug, Clone, Default)]
pub struct JumpMeasure {
    components: Vec<Arc<dyn JumpComponent>>,
}

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-15, 1e-12)
}

impl JumpMeasure {
    pub fn none() -> Self {
        JumpMeasure::default()
    }

    pub fn new(components: Vec<Arc<dyn JumpComponent>>) -> Self {
        JumpMeasure { components }
    }

    pub fn with(mut self, c: impl JumpComponent + 'static) -> Self {
        self.components.push(Arc::new(c));
        self
    }

    pub fn components(&self) -> &[Arc<dyn JumpComponent>] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn families(&self) -> Vec<&'static str> {
        self.components.iter().map(|c| c.family()).collect()
    }

    /// `ν(ℝ)`, `None` when infinite.
    pub fn total_mass(&self) -> Option<f64> {
        self.components
            .iter()
            .try_fold(0.0, |acc, c| c.total_mass().map(|m| acc + m))
    }

    /// Largest singular index among components (`None` if all bounded at 0).
    pub fn singular_index(&self) -> Option<f64> {
        self.components
            .iter()
            .filter_map(|c| c.singular_index())
            .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.max(b))))
    }

    /// `∫_{|y|≤1} |y| ν(dy) < ∞`.
    pub fn finite_variation(&self) -> bool {
        self.singular_index().is_none_or(|b| b < 1.0)
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.components.iter().flat_map(|c| c.atoms().iter().copied()).collect()
    }

    /// True when ν is a finite sum of point masses.
    pub fn is_purely_atomic(&self) -> bool {
        !self.components.is_empty() && self.components.iter().all(|c| !c.has_density())
    }

    pub fn stable_part(&self) -> Option<StableNegativePart> {
        self.components.iter().find_map(|c| c.stable_part())
    }

    /// Intersection of the component moment strips.
    pub fn moment_strip(&self) -> (f64, f64) {
        self.components.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), c| {
            let (a, b) = c.moment_strip();
            (lo.max(a), hi.min(b))
        })
    }

    pub fn support(&self) -> (f64, f64) {
        self.components.iter().fold((0.0, 0.0), |(lo, hi), c| {
            let (a, b) = c.support();
            (lo.min(a), hi.max(b))
        })
    }

    pub fn truncation(&self, tol: f64) -> (f64, f64) {
        self.components.iter().fold((0.0, 0.0), |(lo, hi), c| {
            let (a, b) = c.truncation(tol);
            (lo.min(a), hi.max(b))
        })
    }

    /// `∫_{[lo, hi]} f dν` where `f(y) = O(|y|^order)` at zero. Returns
    /// `+∞` when the integral diverges at zero (for nonnegative `f`).
    pub fn integrate(&self, f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, order: u32) -> Result<f64> {
        let mut total = 0.0;
        for c in &self.components {
            total += integrate_component(c.as_ref(), f, lo, hi, order)?;
        }
        Ok(total)
    }

    /// Lévy-Khinchin jump part `∫(e^{iwy} - 1 - iwy 1_{|y|≤1}) ν(dy)`, using
    /// closed forms where the family provides them.
    pub fn exponent(&self, w: Complex64) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for c in &self.components {
            total += match c.closed_form_exponent(w) {
                Some(v) => v,
                None => exponent_by_quadrature(c.as_ref(), w)?,
            };
        }
        Ok(total)
    }

    /// Same functional as [`JumpMeasure::exponent`], always by direct quadrature
    /// against the density and atoms. Used as an independent check.
    pub fn exponent_by_quadrature(&self, w: Complex64) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for c in &self.components {
            total += exponent_by_quadrature(c.as_ref(), w)?;
        }
        Ok(total)
    }

    /// `∫(e^y - 1 - y 1_{|y|≤1}) ν(dy)`: the jump part of the martingale condition.
    pub fn martingale_compensator(&self) -> Result<f64> {
        let inner = self.integrate(&crate::special::expm1_minus_id, -1.0, 1.0, 2)?;
        let outer = self.integrate(&|y: f64| y.exp_m1(), f64::NEG_INFINITY, -1.0, 0)?
            + self.integrate(&|y: f64| y.exp_m1(), 1.0, f64::INFINITY, 0)?;
        Ok(inner + outer)
    }

    /// `∫_{|y|≥1} e^y ν(dy)`.
    pub fn exp_tail_moment(&self) -> Result<f64> {
        Ok(self.integrate(&|y: f64| y.exp(), 1.0, f64::INFINITY, 0)?
            + self.integrate(&|y: f64| y.exp(), f64::NEG_INFINITY, -1.0, 0)?)
    }

    /// `∫_{|y|≤1} y ν(dy)`; `±∞` when the measure has infinite variation.
    pub fn small_jump_mean(&self) -> Result<f64> {
        let neg = self.integrate(&|y: f64| -y, -1.0, 0.0, 1)?;
        let pos = self.integrate(&|y: f64| y, 0.0, 1.0, 1)?;
        Ok(pos - neg)
    }

    /// `∫_{|y|<eps} y² ν(dy)`.
    pub fn small_jump_variance(&self, eps: f64) -> Result<f64> {
        self.integrate(&|y: f64| y * y, -eps, eps, 2)
    }

    /// `∫ y² ν(dy)`.
    pub fn quadratic_variation(&self) -> Result<f64> {
        self.integrate(&|y: f64| y * y, f64::NEG_INFINITY, f64::INFINITY, 2)
    }

    /// `ν((-∞, 0)) > 0`.
    pub fn has_negative_jumps(&self) -> bool {
        self.components.iter().any(|c| {
            c.atoms().iter().any(|a| a.location < 0.0) || (c.has_density() && c.support().0 < 0.0)
        })
    }

    /// `∫_0^∞ (x ∧ 1) ν(dx) = ∞`.
    pub fn positive_infinite_variation(&self) -> bool {
        self.components.iter().any(|c| {
            c.support().1 > 0.0 && c.singular_index().is_some_and(|b| b >= 1.0)
        })
    }
}

fn exponent_by_quadrature(c: &dyn JumpComponent, w: Complex64) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let mut total = Complex64::new(0.0, 0.0);
    for a in c.atoms() {
        let iwy = i * w * a.location;
        total += a.intensity * if a.location.abs() <= 1.0 { cexpm1_minus_id(iwy) } else { iwy.exp() - 1.0 };
    }
    if !c.has_density() {
        return Ok(total);
    }
    let compensated = |y: f64| cexpm1_minus_id(i * w * y) * c.density(y);
    let plain = |y: f64| {
        let d = c.density(y);
        if d == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let v = ((i * w * y).exp() - 1.0) * d;
        if v.is_finite() { v } else { far_tail(y, v) }
    };
    let tol = Tolerance::new(1e-15, 1e-12);
    let (lo, hi) = c.support();
    for (a, b, _) in pieces(lo, hi) {
        total += if b <= -1.0 || a >= 1.0 {
            density_piece(c, &plain, a, b, 0, tol)?
        } else {
            density_piece(c, &compensated, a, b, 2, tol)?
        };
    }
    Ok(total)
}

/// Half-line quadrature maps can sample `|y|` in the thousands where `e^y`
/// overflows before the density underflows. Those points carry no mass once
/// the moment condition holds.
fn far_tail<T: crate::quadrature::QuadValue>(y: f64, v: T) -> T {
    if y.abs() > 700.0 { T::zero() } else { v }
}

/// Splits `[lo, hi]` at -1, 0, 1. The flag marks pieces with an endpoint at 0.
fn pieces(lo: f64, hi: f64) -> Vec<(f64, f64, bool)> {
    let mut cuts = vec![lo];
    for p in [-1.0, 0.0, 1.0] {
        if p > lo && p < hi {
            cuts.push(p);
        }
    }
    cuts.push(hi);
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], w[0] == 0.0 || w[1] == 0.0))
        .collect()
}

fn density_piece<T, F>(c: &dyn JumpComponent, f: &F, a: f64, b: f64, order: u32, tol: Tolerance) -> Result<T>
where
    T: crate::quadrature::QuadValue,
    F: Fn(f64) -> T,
{
    let touches_zero = a == 0.0 || b == 0.0;
    match (touches_zero, c.singular_index()) {
        (true, Some(beta)) => {
            let p = order as f64 - 1.0 - beta;
            if p <= -1.0 {
                return Err(Error::Domain("divergent integral at zero".into()));
            }
            if b == 0.0 {
                integrate_left_singular(|t: f64| f(-t), p, 0.0, -a, tol)
            } else {
                integrate_left_singular(f, p, 0.0, b, tol)
            }
        }
        _ => {
            if a.is_infinite() && b.is_infinite() {
                let l = integrate_to_infinity(|t: f64| f(-t), 0.0, tol)?;
                let r = integrate_to_infinity(f, 0.0, tol)?;
                Ok(l + r)
            } else if b.is_infinite() {
                integrate_to_infinity(f, a, tol)
            } else if a.is_infinite() {
                integrate_to_infinity(|t: f64| f(-t), -b, tol)
            } else {
                integrate(f, a, b, tol)
            }
        }
    }
}

fn integrate_component(c: &dyn JumpComponent, f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, order: u32) -> Result<f64> {
    let mut total = 0.0;
    for a in c.atoms() {
        if a.location >= lo && a.location <= hi {
            total += a.intensity * f(a.location);
        }
    }
    let (slo, shi) = c.support();
    let lo = lo.max(slo);
    let hi = hi.min(shi);
    if hi <= lo || !c.has_density() {
        return Ok(total);
    }
    for (a, b, _) in pieces(lo, hi) {
        let g = |y: f64| {
            let d = c.density(y);
            if d == 0.0 {
                return 0.0;
            }
            let v = f(y) * d;
            if v.is_finite() { v } else { far_tail(y, v) }
        };
        match density_piece(c, &g, a, b, order, quad_tol()) {
            Ok(v) => total += v,
            Err(Error::Domain(_)) => return Ok(f64::INFINITY * f(0.5 * (a + b)).signum()),
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}
