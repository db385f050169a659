//! Small-time laws for the gap between the strike and the critical price,
//! regime detection, and fits of extracted boundaries against those laws.

mod constants;
mod divergence;
mod fit;

use serde::Serialize;

pub use constants::{stable_constants, StableConstants};
pub use divergence::{divergence_check, growth_report, DivergenceReport};
pub use fit::{fit_boundary_rate, fit_european_rate, fit_points, fits_table, RateFit};

use crate::error::{Error, Result};
use crate::model::{LevyModel, MarketParams};
use statrs::function::gamma::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum Regime {
    /// `σ > 0`, finite-variation jumps, `d₊ ≥ 0`.
    DiffusionDominated { sigma: f64 },
    /// `σ = 0`, finite variation, `d₊ ≥ 0`; `neg = ∫(e^y - 1)₋ ν(dy)`.
    FiniteVariation { neg: f64 },
    /// `σ = 0`, negative jumps `η(y)/|y|^{1+α}` near zero with `1 < α < 2`,
    /// the rest of the measure of finite variation, `d₊ > 0`.
    TemperedStable { alpha: f64, eta0: f64 },
    /// Infinite variation without a closed-form rate.
    InfiniteVariationOther,
    /// `d₊ < 0`: the boundary tends to `ξ < K`.
    LimitBelowStrike { xi: f64 },
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::DiffusionDominated { .. } => "diffusion_dominated",
            Regime::FiniteVariation { .. } => "finite_variation",
            Regime::TemperedStable { .. } => "tempered_stable",
            Regime::InfiniteVariationOther => "infinite_variation_other",
            Regime::LimitBelowStrike { .. } => "limit_below_strike",
        }
    }
}

pub fn detect_regime(model: &LevyModel) -> Result<Regime> {
    let d = model.d_plus()?;
    if d < 0.0 {
        return Ok(Regime::LimitBelowStrike { xi: model.limit_critical_price()? });
    }
    let nu = &model.nu;
    if nu.finite_variation() {
        if model.sigma > 0.0 {
            return Ok(Regime::DiffusionDominated { sigma: model.sigma });
        }
        return Ok(Regime::FiniteVariation { neg: model.exp_moment_integrals()?.neg });
    }
    if model.sigma == 0.0 && d > 0.0 {
        if let Some(sp) = nu.stable_part() {
            let stable = nu.components().iter().filter(|c| c.stable_part().is_some()).count();
            let rest_fv = nu
                .components()
                .iter()
                .filter(|c| c.stable_part().is_none())
                .all(|c| c.singular_index().is_none_or(|a| a < 1.0));
            if stable == 1 && rest_fv {
                return Ok(Regime::TemperedStable { alpha: sp.alpha, eta0: sp.eta0 });
            }
        }
    }
    Ok(Regime::InfiniteVariationOther)
}

/// Which transform of the boundary a law is stated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapForm {
    /// `K - b(θ)`
    Absolute,
    /// `K / b(θ) - 1`
    Relative,
}

impl GapForm {
    pub fn of(&self, strike: f64, b: f64) -> f64 {
        match self {
            GapForm::Absolute => strike - b,
            GapForm::Relative => strike / b - 1.0,
        }
    }
}

/// `gap(θ) ≈ constant · θ^exponent · |ln θ|^log_exponent` in the given form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatePrediction {
    pub regime: &'static str,
    pub form: GapForm,
    pub constant: f64,
    pub exponent: f64,
    pub log_exponent: f64,
}

impl RatePrediction {
    pub fn gap(&self, theta: f64) -> f64 {
        self.constant * theta.powf(self.exponent) * theta.ln().abs().powf(self.log_exponent)
    }
}

/// Leading-order law for the regime.
pub fn prediction(regime: &Regime, market: &MarketParams) -> Result<RatePrediction> {
    let k = market.strike;
    let (form, constant, exponent, log_exponent) = match *regime {
        Regime::DiffusionDominated { sigma } => (GapForm::Absolute, sigma * k, 0.5, 0.5),
        Regime::FiniteVariation { neg } => (GapForm::Relative, neg, 1.0, 0.0),
        Regime::TemperedStable { alpha, eta0 } => {
            let c = (eta0 * gamma(2.0 - alpha) / (alpha - 1.0)).powf(1.0 / alpha);
            (GapForm::Absolute, k * c, 1.0 / alpha, 1.0 - 1.0 / alpha)
        }
        Regime::LimitBelowStrike { xi } => (GapForm::Absolute, k - xi, 0.0, 0.0),
        Regime::InfiniteVariationOther => {
            return Err(Error::NotApplicable("no closed form for this regime; use divergence_check".into()))
        }
    };
    Ok(RatePrediction { regime: regime.tag(), form, constant, exponent, log_exponent })
}

/// Predicted `K - b(θ)` in currency. The finite-variation law is stated for
/// `K/b - 1` and converted with `K - b = K g / (1 + g)`.
pub fn predicted_gap(regime: &Regime, theta: f64, market: &MarketParams) -> Result<f64> {
    if !(theta > 0.0) || theta > 0.5 * market.maturity {
        return Err(Error::Domain(format!("θ = {theta} outside (0, T/2]")));
    }
    let p = prediction(regime, market)?;
    if p.log_exponent > 0.0 && theta >= 1.0 {
        return Err(Error::Domain(format!("θ = {theta} must be below one year for the |ln θ| law")));
    }
    let g = p.gap(theta);
    Ok(match p.form {
        GapForm::Absolute => g,
        GapForm::Relative => market.strike * g / (1.0 + g),
    })
}
