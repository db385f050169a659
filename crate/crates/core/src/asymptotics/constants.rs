use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::special::expm1_minus_id;

#[derive(Debug, Clone, Serialize)]
pub struct StableConstants {
    pub alpha: f64,
    pub eta0: f64,
    /// `Γ(2-α) / (α(α-1))`
    pub i_alpha: f64,
    /// `∫_0^∞ (e^{-z} - 1 + z) z^{-1-α} dz` by quadrature.
    pub i_alpha_quadrature: f64,
    /// `(a, J_α(a))`
    pub j_alpha: Vec<(f64, f64)>,
    /// `(η₀ Γ(2-α) / (α-1))^{1/α}`
    pub rate_constant: f64,
    pub warnings: Vec<String>,
}

const EDGE: f64 = 1e-3;

/// `eta_sup(a) = sup_{u ∈ (a, 0)} η(u)`; `J_α` is evaluated at each `a`.
pub fn stable_constants(alpha: f64, eta0: f64, eta_sup: &dyn Fn(f64) -> f64, a_values: &[f64]) -> Result<StableConstants> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("α = {alpha} outside (1, 2)")));
    }
    if !(eta0 > 0.0) {
        return Err(Error::Domain(format!("η₀ = {eta0} must be positive")));
    }
    let mut warnings = Vec::new();
    if alpha - 1.0 < EDGE {
        warnings.push(format!("α = {alpha} is close to 1: 1/(α-1) blows up"));
    }
    if 2.0 - alpha < EDGE {
        warnings.push(format!("α = {alpha} is close to 2: Γ(2-α) blows up"));
    }
    let i_alpha = gamma(2.0 - alpha) / (alpha * (alpha - 1.0));
    let i_alpha_quadrature = i_alpha_by_quadrature(alpha)?;
    let rel = (i_alpha - i_alpha_quadrature).abs() / i_alpha;
    if rel > 1e-8 {
        return Err(Error::Numerical(format!(
            "I_α by quadrature {i_alpha_quadrature:e} differs from the Γ form {i_alpha:e} by {rel:.1e}"
        )));
    }
    let j_alpha = a_values
        .iter()
        .map(|&a| {
            let eta = if a < 0.0 { eta_sup(a) } else { eta0 };
            let denom = alpha.powf(alpha / (alpha - 1.0)) * (eta * i_alpha).powf(1.0 / (alpha - 1.0));
            (a, (alpha - 1.0) / denom)
        })
        .collect();
    let rate_constant = (eta0 * gamma(2.0 - alpha) / (alpha - 1.0)).powf(1.0 / alpha);
    Ok(StableConstants { alpha, eta0, i_alpha, i_alpha_quadrature, j_alpha, rate_constant, warnings })
}

/// Split at 1. On `[0, 1]`, `v = z^{2-α}`; on `[1, ∞)`, `z = 1/u` then
/// `v = u^{α-1}`. Both integrands are then bounded and smooth.
fn i_alpha_by_quadrature(alpha: f64) -> Result<f64> {
    let tol = Tolerance::new(1e-15, 1e-12);
    // (e^{-z} - 1 + z)/z², kept finite where z² underflows
    let ratio = |z: f64| if z < 1e-100 { 0.5 - z / 6.0 } else { expm1_minus_id(-z) / (z * z) };
    let (a, b) = (2.0 - alpha, alpha - 1.0);
    let near = integrate(|v: f64| ratio(v.powf(1.0 / a)), 0.0, 1.0, tol)? / a;
    let far = integrate(
        |v: f64| {
            let u = v.powf(1.0 / b);
            if u > 0.0 { 1.0 - u + u * (-1.0 / u).exp() } else { 1.0 }
        },
        0.0,
        1.0,
        tol,
    )? / b;
    Ok(near + far)
}
