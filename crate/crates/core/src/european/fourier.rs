//! Contour integral along `Im u = -1/2`: for any finite measure μ on log-returns,
//! `E_μ[min(S e^{(r-δ)θ+X}, K)] e^{-rθ} = √(SK) e^{-(r+δ)θ/2}/π ∫_0^∞ Re[e^{ivκ} Φ_μ(v - i/2)]/(v² + 1/4) dv`
//! with `κ = ln(S/K) + (r-δ)θ`, and the put is `K e^{-rθ} μ(ℝ)` minus that.
//!
//! Pure-drift models with finite activity carry an atom of mass `e^{-λθ}`
//! whose transform never decays; it is removed and priced directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::quadrature::{integrate, Tolerance};

const V_MAX: f64 = 2.0e6;

struct Atom {
    mass: f64,
    shift: f64,
}

pub fn lewis_put(model: &LevyModel, spot: f64, theta: f64) -> Result<f64> {
    let m = &model.market;
    let k = m.strike;
    let fwd_drift = (m.r - m.delta) * theta;
    let kappa = (spot / k).ln() + fwd_drift;
    let disc = (-m.r * theta).exp();
    let scale = (spot * k).sqrt() * (-(m.r + m.delta) * theta / 2.0).exp() / std::f64::consts::PI;

    let atom = match (model.sigma == 0.0, model.nu.total_mass()) {
        (true, Some(lambda)) => Some(Atom {
            mass: (-lambda * theta).exp(),
            shift: (model.gamma - model.nu.small_jump_mean()?) * theta,
        }),
        _ => None,
    };
    let i = Complex64::new(0.0, 1.0);
    let phi = |v: f64| -> Result<Complex64> {
        let u = Complex64::new(v, -0.5);
        let mut f = (theta * model.characteristic_exponent(u)?).exp();
        if let Some(a) = &atom {
            f -= a.mass * (i * u * a.shift).exp();
        }
        Ok(f)
    };

    // Tail bound ∫_V^∞ |Φ|/v² ≤ sup|Φ|/V; grow V until it is negligible.
    let target = 1e-11 * k / scale;
    let mut v_cut = 4.0;
    loop {
        let mut sup = 0.0f64;
        for j in 0..48 {
            let v = v_cut * (1.0 + j as f64 / 47.0);
            sup = sup.max(phi(v)?.norm());
        }
        if sup / v_cut < target {
            break;
        }
        v_cut *= 2.0;
        if v_cut > V_MAX {
            return Err(Error::Domain(format!(
                "characteristic function decays too slowly for contour pricing (θ={theta})"
            )));
        }
    }

    let width = (std::f64::consts::PI / kappa.abs().max(1e-12)).max(v_cut / 256.0).min(v_cut);
    let pieces = (v_cut / width).ceil() as usize;
    let tol = Tolerance { abs: 1e-13 * k / scale / pieces as f64, rel: 1e-12, max_intervals: 2000 };
    let mut total = 0.0;
    let failure = std::cell::RefCell::new(None);
    for p in 0..pieces {
        let a = p as f64 * width;
        let b = ((p + 1) as f64 * width).min(v_cut);
        let g = |v: f64| match phi(v) {
            Ok(f) => ((i * v * kappa).exp() * f).re / (v * v + 0.25),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e.to_string());
                f64::NAN
            }
        };
        let piece = integrate(g, a, b, tol);
        if let Some(msg) = failure.borrow_mut().take() {
            return Err(Error::Domain(msg));
        }
        total += piece?;
    }

    let (mass, atom_value) = match &atom {
        Some(a) => (1.0 - a.mass, a.mass * disc * (k - spot * (fwd_drift + a.shift).exp()).max(0.0)),
        None => (1.0, 0.0),
    };
    Ok(k * disc * mass - scale * total + atom_value)
}
