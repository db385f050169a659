//! Exact Poisson-mixture expansion for purely atomic ν: conditional on the
//! jump counts, `X_θ` is Gaussian (or a point when σ = 0).

use statrs::distribution::{Discrete, Poisson};

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::special::lognormal_put;

const MASS_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 2_000_000;

pub fn mixture_put(model: &LevyModel, spot: f64, theta: f64) -> Result<f64> {
    if !model.nu.is_purely_atomic() {
        return Err(Error::NotApplicable("mixture pricing needs a purely atomic jump measure".into()));
    }
    let m = &model.market;
    let atoms = model.nu.atoms();
    let drift = (model.gamma - model.nu.small_jump_mean()?) * theta;
    let base = spot.ln() + (m.r - m.delta) * theta + drift;
    let var = model.sigma * model.sigma * theta;

    // Per-atom count distributions truncated once the remaining tail is negligible.
    let mut counts: Vec<Vec<f64>> = Vec::with_capacity(atoms.len());
    for a in &atoms {
        let mean = a.intensity * theta;
        let pois = Poisson::new(mean).map_err(|e| Error::Numerical(e.to_string()))?;
        let mut pmf = Vec::new();
        let mut acc = 0.0;
        let mut n = 0u64;
        while acc < 1.0 - MASS_TOL / atoms.len() as f64 || (n as f64) < mean {
            let p = pois.pmf(n);
            pmf.push(p);
            acc += p;
            n += 1;
            if n > 100_000 {
                break;
            }
        }
        counts.push(pmf);
    }
    let terms: usize = counts.iter().map(|c| c.len()).product();
    if terms > MAX_TERMS {
        return Err(Error::NotApplicable(format!("mixture expansion needs {terms} terms")));
    }

    let mut value = 0.0;
    let mut idx = vec![0usize; atoms.len()];
    loop {
        let mut p = 1.0;
        let mut shift = 0.0;
        for (j, &n) in idx.iter().enumerate() {
            p *= counts[j][n];
            shift += n as f64 * atoms[j].location;
        }
        if p > 0.0 {
            value += p * lognormal_put(m.strike, base + shift, var);
        }
        // odometer increment
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok((-m.r * theta).exp() * value);
            }
            idx[j] += 1;
            if idx[j] < counts[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}
