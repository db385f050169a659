use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::JumpDrawer;
use crate::model::LevyModel;

/// Draws per RNG substream. Fixed so results do not depend on thread count.
pub const CHUNK: usize = 4096;

/// How the small-jump cutoff is chosen for a horizon `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsPolicy {
    Fixed(f64),
    /// `ε = c t^{1/β}` with `β` the singularity index of ν (1 when ν is regular).
    Scaled(f64),
}

impl EpsPolicy {
    pub fn resolve(self, model: &LevyModel, t: f64) -> f64 {
        match self {
            EpsPolicy::Fixed(e) => e,
            EpsPolicy::Scaled(c) => {
                let beta = model.nu.singular_index().unwrap_or(1.0).max(0.5);
                c * t.powf(1.0 / beta)
            }
        }
    }
}

/// Exact compound-Poisson sampling of jumps with `|y| ≥ ε` plus a Gaussian
/// stand-in for the rest. The Gaussian mean is matched to the small-jump
/// exponential moment, so `E e^{X_t} = 1` holds exactly for the sampled law.
pub struct IncrementSampler {
    pub epsilon: f64,
    pub sigma: f64,
    /// Drift per unit time of everything except the large-jump sum.
    pub drift: f64,
    pub proxy_sd: f64,
    pub intensity: f64,
    drawers: Vec<Box<dyn JumpDrawer>>,
    cumulative: Vec<f64>,
}

impl std::fmt::Debug for IncrementSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IncrementSampler")
            .field("epsilon", &self.epsilon)
            .field("sigma", &self.sigma)
            .field("drift", &self.drift)
            .field("proxy_sd", &self.proxy_sd)
            .field("intensity", &self.intensity)
            .finish()
    }
}

impl IncrementSampler {
    pub fn new(model: &LevyModel, epsilon: f64) -> Result<Self> {
        let nu = &model.nu;
        let eps = if nu.total_mass().is_some() { epsilon.max(0.0) } else { epsilon };
        if !(eps >= 0.0) || eps > 1.0 || (nu.total_mass().is_none() && !(eps > 0.0)) {
            return Err(Error::Config(format!("invalid jump cutoff {epsilon}")));
        }
        let mut drawers = Vec::new();
        for c in nu.components() {
            drawers.push(c.large_jump_sampler(eps)?);
        }
        let mut cumulative = Vec::with_capacity(drawers.len());
        let mut total = 0.0;
        for d in &drawers {
            total += d.intensity();
            cumulative.push(total);
        }
        let (small_var, small_exp, mid_mean) = if eps > 0.0 && !nu.is_zero() {
            let open = eps * (1.0 - 1e-15);
            let var = nu.small_jump_variance(open)?;
            let exp = nu.integrate(&crate::special::expm1_minus_id, -open, open, 2)?;
            let mid = nu.integrate(&|y: f64| y, eps, 1.0, 1)? + nu.integrate(&|y: f64| y, -1.0, -eps, 1)?;
            (var, exp, mid)
        } else {
            (0.0, 0.0, if nu.is_zero() { 0.0 } else { nu.small_jump_mean()? })
        };
        let qv = model.sigma * model.sigma + nu.quadratic_variation()?;
        if small_var > 0.5 * qv {
            return Err(Error::Config(format!(
                "small-jump proxy variance {small_var:.3e} exceeds half the quadratic variation {qv:.3e}; lower epsilon"
            )));
        }
        Ok(IncrementSampler {
            epsilon: eps,
            sigma: model.sigma,
            drift: model.gamma - mid_mean + small_exp - 0.5 * small_var,
            proxy_sd: small_var.sqrt(),
            intensity: total,
            drawers,
            cumulative,
        })
    }

    /// One draw of `X_t`; `on_jump` sees every resolved jump.
    pub fn draw_with(&self, t: f64, rng: &mut dyn RngCore, on_jump: &mut dyn FnMut(f64)) -> f64 {
        let sd = (self.sigma * self.sigma + self.proxy_sd * self.proxy_sd).sqrt() * t.sqrt();
        let z: f64 = StandardNormal.sample(rng);
        let mut x = self.drift * t + sd * z;
        let lt = self.intensity * t;
        if lt > 0.0 {
            let n = Poisson::new(lt).map(|p| p.sample(rng) as u64).unwrap_or(0);
            for _ in 0..n {
                let y = self.pick(rng).draw(rng);
                on_jump(y);
                x += y;
            }
        }
        x
    }

    pub fn draw(&self, t: f64, rng: &mut dyn RngCore) -> f64 {
        self.draw_with(t, rng, &mut |_| {})
    }

    fn pick(&self, rng: &mut dyn RngCore) -> &dyn JumpDrawer {
        if self.drawers.len() == 1 {
            return self.drawers[0].as_ref();
        }
        let u = rng.random::<f64>() * self.intensity;
        let k = self.cumulative.partition_point(|&c| c <= u).min(self.drawers.len() - 1);
        self.drawers[k].as_ref()
    }
}

/// Substream `chunk` of `seed`.
pub fn substream(seed: u64, chunk: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Evaluates `f` `n` times across fixed-size substreams in parallel. The
/// result order and values depend only on `(seed, n)`.
pub fn chunked<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha20Rng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = substream(seed, k as u64);
            let len = CHUNK.min(n - k * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// `n` i.i.d. draws of `X_t`.
pub fn sample_terminal(model: &LevyModel, t: f64, n: usize, seed: u64, eps: EpsPolicy) -> Result<Vec<f64>> {
    if !(t > 0.0) || n == 0 {
        return Err(Error::Config(format!("sample_terminal needs t > 0 and n ≥ 1, got t={t}, n={n}")));
    }
    let sampler = IncrementSampler::new(model, eps.resolve(model, t))?;
    Ok(chunked(n, seed, |rng| sampler.draw(t, rng)))
}

/// Sample mean and standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
