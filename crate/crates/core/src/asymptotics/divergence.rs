use serde::Serialize;

use crate::american::BoundaryCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    /// Decreasing `θ` ladder.
    pub thetas: Vec<f64>,
    /// `g(θ) = (K/b(θ) - 1)/θ`
    pub g: Vec<f64>,
    /// `g` nondecreasing as `θ` decreases.
    pub increasing: bool,
    /// `g(θ_last) / g(θ_first)`
    pub growth_factor: f64,
}

/// `g` on nine points spanning two decades below `theta_hi`, with `b`
/// interpolated from the curve.
pub fn divergence_check(curve: &BoundaryCurve, theta_hi: f64) -> Result<DivergenceReport> {
    let mut pts = Vec::with_capacity(9);
    for i in 0..9 {
        let theta = theta_hi * 10f64.powf(-(i as f64) / 4.0);
        let b = curve
            .b_at(theta)
            .ok_or_else(|| Error::Data(format!("boundary missing at θ = {theta:e}")))?;
        pts.push((theta, (curve.strike / b - 1.0) / theta));
    }
    Ok(growth_report(&pts))
}

/// Report for `(θ, g)` pairs ordered by decreasing `θ`.
pub fn growth_report(points: &[(f64, f64)]) -> DivergenceReport {
    let thetas: Vec<f64> = points.iter().map(|p| p.0).collect();
    let g: Vec<f64> = points.iter().map(|p| p.1).collect();
    let increasing = g.windows(2).all(|w| w[1] >= w[0]);
    let growth_factor = match (g.first(), g.last()) {
        (Some(a), Some(b)) if *a != 0.0 => b / a,
        _ => f64::NAN,
    };
    DivergenceReport { thetas, g, increasing, growth_factor }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_growth_over_two_decades() {
        let pts: Vec<(f64, f64)> = (0..9)
            .map(|i| {
                let t = 1e-2 * 10f64.powf(-(i as f64) / 4.0);
                (t, t.powf(-1.0 / 3.0))
            })
            .collect();
        let r = growth_report(&pts);
        assert!(r.increasing);
        assert!((r.growth_factor - 10f64.powf(2.0 / 3.0)).abs() < 1e-12);
    }
}
