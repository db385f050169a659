use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::simulation::{chunked, mean_stderr, EpsPolicy, IncrementSampler};

/// Discounted put payoff over `n_paths` terminal draws. Returns `(value, stderr)`.
pub fn mc_put(model: &LevyModel, spot: f64, theta: f64, n_paths: usize, seed: u64, eps: EpsPolicy) -> Result<(f64, f64)> {
    if n_paths < 2 {
        return Err(Error::Config("Monte Carlo pricing needs at least two paths".into()));
    }
    let m = &model.market;
    let sampler = IncrementSampler::new(model, eps.resolve(model, theta))?;
    let disc = (-m.r * theta).exp();
    let fwd = spot * ((m.r - m.delta) * theta).exp();
    let payoffs = chunked(n_paths, seed, |rng| {
        let x = sampler.draw(theta, rng);
        disc * (m.strike - fwd * x.exp()).max(0.0)
    });
    Ok(mean_stderr(&payoffs))
}
