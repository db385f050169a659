use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{GapForm, RatePrediction};
use crate::american::BoundaryCurve;
use crate::error::{Error, Result};
use crate::io::{num, Table};

#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub regime: &'static str,
    pub form: GapForm,
    pub window: (f64, f64),
    pub points: usize,
    pub fitted_exponent: f64,
    /// 95% interval for the exponent.
    pub exponent_ci: (f64, f64),
    pub fitted_constant: f64,
    pub constant_ci: (f64, f64),
    pub target_exponent: f64,
    pub target_constant: f64,
    pub r_squared: f64,
    /// Residuals of the log-log regression, in window order.
    pub residuals: Vec<f64>,
}

impl RateFit {
    pub const HEADER: [&'static str; 7] = ["regime", "window_lo", "window_hi", "exponent", "constant", "target", "r2"];

    pub fn row(&self) -> Vec<String> {
        vec![
            self.regime.to_string(),
            num(self.window.0),
            num(self.window.1),
            num(self.fitted_exponent),
            num(self.fitted_constant),
            num(self.target_constant),
            num(self.r_squared),
        ]
    }

    pub fn exponent_error(&self) -> f64 {
        (self.fitted_exponent - self.target_exponent).abs()
    }

    pub fn constant_error(&self) -> f64 {
        (self.fitted_constant / self.target_constant - 1.0).abs()
    }
}

pub fn fits_table(fits: &[RateFit]) -> Table {
    let mut t = Table::new(&RateFit::HEADER);
    for f in fits {
        t.push(f.row());
    }
    t
}

/// Fits the American boundary on `lo ≤ θ ≤ hi`.
pub fn fit_boundary_rate(curve: &BoundaryCurve, law: &RatePrediction, window: (f64, f64)) -> Result<RateFit> {
    fit_points(&curve.window(window.0, window.1), curve.strike, law, window)
}

/// Same fit for the European critical price.
pub fn fit_european_rate(curve: &BoundaryCurve, law: &RatePrediction, window: (f64, f64)) -> Result<RateFit> {
    fit_points(&curve.window_e(window.0, window.1), curve.strike, law, window)
}

/// Regress `ln(gap / |ln θ|^q)` on `ln θ` over `(θ, b)` pairs.
pub fn fit_points(points: &[(f64, f64)], strike: f64, law: &RatePrediction, window: (f64, f64)) -> Result<RateFit> {
    if points.len() < 8 {
        return Err(Error::Data(format!(
            "{} boundary points in [{:e}, {:e}], need at least 8",
            points.len(),
            window.0,
            window.1
        )));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(theta, b) in points {
        let g = law.form.of(strike, b);
        if !(g > 0.0) {
            return Err(Error::Data(format!("nonpositive gap {g:e} at θ = {theta:e}")));
        }
        xs.push(theta.ln());
        ys.push(g.ln() - law.log_exponent * theta.ln().abs().ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Data("window holds a single θ value".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - intercept - slope * x).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let s2 = sse / (n - 2.0);
    let se_slope = (s2 / sxx).sqrt();
    let se_icpt = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 2.0)
        .map_err(|e| Error::Numerical(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(RateFit {
        regime: law.regime,
        form: law.form,
        window,
        points: points.len(),
        fitted_exponent: slope,
        exponent_ci: (slope - t * se_slope, slope + t * se_slope),
        fitted_constant: intercept.exp(),
        constant_ci: ((intercept - t * se_icpt).exp(), (intercept + t * se_icpt).exp()),
        target_exponent: law.exponent,
        target_constant: law.constant,
        r_squared,
        residuals,
    })
}
