use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::sampler::{chunked, mean_stderr, pairwise_sum, EpsPolicy, IncrementSampler};
use crate::asymptotics::{detect_regime, Regime};
use crate::error::{Error, Result};
use crate::io::{num, Table};
use crate::model::LevyModel;
use crate::quadrature::{integrate, Tolerance};

/// One line of a simulation report.
#[derive(Debug, Clone, Serialize)]
pub struct SimRow {
    pub check: &'static str,
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub zscore: f64,
}

impl SimRow {
    pub const HEADER: [&'static str; 6] = ["check", "t", "estimate", "stderr", "target", "zscore"];

    fn new(check: &'static str, t: f64, estimate: f64, stderr: f64, target: f64) -> Self {
        let zscore = if stderr > 0.0 { (estimate - target) / stderr } else { f64::NAN };
        SimRow { check, t, estimate, stderr, target, zscore }
    }
}

pub fn sim_table(rows: &[SimRow]) -> Table {
    let mut t = Table::new(&SimRow::HEADER);
    for r in rows {
        t.push(vec![r.check.to_string(), num(r.t), num(r.estimate), num(r.stderr), num(r.target), num(r.zscore)]);
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct CompensationReport {
    pub epsilon: f64,
    pub row: SimRow,
}

/// `E Σ_{s≤t} f(ΔX_s)` over resolved jumps against `t ∫_{|y|≥ε} f dν`.
pub fn compensation_check(
    model: &LevyModel,
    f: &(dyn Fn(f64) -> f64 + Sync),
    t: f64,
    n: usize,
    seed: u64,
    eps: EpsPolicy,
) -> Result<CompensationReport> {
    let epsilon = eps.resolve(model, t);
    let sampler = IncrementSampler::new(model, epsilon)?;
    let sums = chunked(n, seed, |rng| {
        let mut s = 0.0;
        sampler.draw_with(t, rng, &mut |y| s += f(y));
        s
    });
    let (est, se) = mean_stderr(&sums);
    let e = sampler.epsilon;
    let target = if e > 0.0 {
        t * (model.nu.integrate(f, f64::NEG_INFINITY, -e, 0)? + model.nu.integrate(f, e, f64::INFINITY, 0)?)
    } else {
        t * model.nu.integrate(f, f64::NEG_INFINITY, f64::INFINITY, 0)?
    };
    Ok(CompensationReport { epsilon: e, row: SimRow::new("compensation", t, est, se, target) })
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    /// `-∫_{|x|≤1} x ν(dx)`
    pub target: f64,
    /// Per rung: the median of `Y_t/t`. The stderr column uses the normal
    /// approximation `√(π/2) sd/√n`.
    pub medians: Vec<SimRow>,
    /// Per rung: the mean of `Y_t/t`, zero for every `t`.
    pub means: Vec<SimRow>,
    /// Last two medians within 10% of each other (absolute when the target is 0).
    pub stabilized: bool,
}

/// `Y_t = Σ_{s≤t} ΔX_s - t ∫_{|x|≤1} x ν(dx)` for finite-variation models.
pub fn small_time_drift_check(model: &LevyModel, ladder: &[f64], n: usize, seed: u64, eps: EpsPolicy) -> Result<DriftReport> {
    if !model.nu.finite_variation() {
        return Err(Error::NotApplicable("the small-time drift limit is stated for finite-variation jumps".into()));
    }
    let comp = if model.nu.is_zero() { 0.0 } else { model.nu.small_jump_mean()? };
    let target = -comp;
    let mut medians = Vec::new();
    let mut means = Vec::new();
    for (i, &t) in ladder.iter().enumerate() {
        let sampler = IncrementSampler::new(model, eps.resolve(model, t))?;
        let e = sampler.epsilon;
        let small_mean = if e > 0.0 && !model.nu.is_zero() {
            let open = e * (1.0 - 1e-15);
            model.nu.integrate(&|y: f64| y, -open, open, 1)?
        } else {
            0.0
        };
        let proxy = sampler.proxy_sd * t.sqrt();
        let mut ys = chunked(n, seed.wrapping_add(i as u64), |rng| {
            let mut jumps = 0.0;
            let z: f64 = StandardNormal.sample(rng);
            sampler.draw_with(t, rng, &mut |y| jumps += y);
            (jumps + small_mean * t + proxy * z) / t - comp
        });
        let (mean, se) = mean_stderr(&ys);
        means.push(SimRow::new("drift_mean", t, mean, se, 0.0));
        ys.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 { ys[n / 2] } else { 0.5 * (ys[n / 2 - 1] + ys[n / 2]) };
        let sd = se * (n as f64).sqrt();
        let med_se = (std::f64::consts::FRAC_PI_2).sqrt() * sd / (n as f64).sqrt();
        medians.push(SimRow::new("drift_median", t, median, med_se, target));
    }
    let stabilized = match medians.as_slice() {
        [.., a, b] => {
            let scale = if target != 0.0 { target.abs() } else { 1.0 };
            (a.estimate - b.estimate).abs() <= 0.1 * scale
        }
        _ => false,
    };
    Ok(DriftReport { target, medians, means, stabilized })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    /// `E(X_t/t)₊` per rung; target is `|σ|/√(2πt)` (zero when `σ = 0`).
    pub rows: Vec<SimRow>,
    /// Estimates nondecreasing as `t` decreases.
    pub monotone: bool,
    /// Slope of `ln E(X_t/t)₊` against `ln t` over the ladder.
    pub fitted_exponent: f64,
    /// Estimate over the Gaussian benchmark at the last rung, when `σ > 0`.
    pub benchmark_ratio: Option<f64>,
}

pub fn positive_part_growth(model: &LevyModel, ladder: &[f64], n: usize, seed: u64, eps: EpsPolicy) -> Result<GrowthReport> {
    let mut rows = Vec::new();
    for (i, &t) in ladder.iter().enumerate() {
        let sampler = IncrementSampler::new(model, eps.resolve(model, t))?;
        let vals = chunked(n, seed.wrapping_add(i as u64), |rng| (sampler.draw(t, rng) / t).max(0.0));
        let (m, se) = mean_stderr(&vals);
        let bench = model.sigma.abs() / (2.0 * std::f64::consts::PI * t).sqrt();
        rows.push(SimRow::new("positive_part", t, m, se, bench));
    }
    let monotone = rows.windows(2).all(|w| w[1].estimate >= w[0].estimate);
    let xs: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.estimate.max(f64::MIN_POSITIVE).ln()).collect();
    let fitted_exponent = slope(&xs, &ys);
    let benchmark_ratio = match rows.last() {
        Some(r) if model.sigma > 0.0 => Some(r.estimate / r.target),
        _ => None,
    };
    Ok(GrowthReport { rows, monotone, fitted_exponent, benchmark_ratio })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct StableLimitReport {
    pub alpha: f64,
    pub eta0: f64,
    /// Per rung: sup over the grid of |empirical ch.f. - limit ch.f.|; the
    /// stderr column is the Monte Carlo noise scale `1/√n`.
    pub rows: Vec<SimRow>,
    /// Errors nonincreasing down the ladder up to twice the noise scale.
    pub nonincreasing: bool,
}

/// Empirical characteristic function of `X_t / t^{1/α}` against
/// `exp(η₀ ∫_0^∞ (e^{-iuz} - 1 + iuz) z^{-1-α} dz)`.
pub fn stable_limit_check(
    model: &LevyModel,
    ladder: &[f64],
    n: usize,
    u_grid: &[f64],
    seed: u64,
    eps: EpsPolicy,
) -> Result<StableLimitReport> {
    let (alpha, eta0) = match detect_regime(model)? {
        Regime::TemperedStable { alpha, eta0 } => (alpha, eta0),
        other => {
            return Err(Error::NotApplicable(format!("stable limit needs the tempered-stable regime, got {}", other.tag())))
        }
    };
    let limit: Vec<Complex64> = u_grid
        .iter()
        .map(|&u| stable_limit_exponent(alpha, eta0, u).map(|p| p.exp()))
        .collect::<Result<_>>()?;
    let noise = 1.0 / (n as f64).sqrt();
    let mut rows = Vec::new();
    for (i, &t) in ladder.iter().enumerate() {
        let sampler = IncrementSampler::new(model, eps.resolve(model, t))?;
        let scale = t.powf(-1.0 / alpha);
        let xs = chunked(n, seed.wrapping_add(i as u64), |rng| sampler.draw(t, rng) * scale);
        let mut worst = 0.0f64;
        let mut re = vec![0.0; xs.len()];
        let mut im = vec![0.0; xs.len()];
        for (&u, target) in u_grid.iter().zip(&limit) {
            for (k, x) in xs.iter().enumerate() {
                let (s, c) = (u * x).sin_cos();
                re[k] = c;
                im[k] = s;
            }
            let ecf = Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) / xs.len() as f64;
            worst = worst.max((ecf - target).norm());
        }
        rows.push(SimRow::new("stable_limit", t, worst, noise, 0.0));
    }
    let nonincreasing = rows.windows(2).all(|w| w[1].estimate <= w[0].estimate + 2.0 * noise);
    Ok(StableLimitReport { alpha, eta0, rows, nonincreasing })
}

/// `η₀ ∫_0^∞ (e^{-iuz} - 1 + iuz) z^{-1-α} dz` by quadrature: `v = z^{2-α}`
/// on `[0, 1]` with a series for small `uz`; on `[1, ∞)` the polynomial
/// part in closed form and the oscillatory part period by period up to `Z`
/// plus a two-term integration-by-parts tail.
pub fn stable_limit_exponent(alpha: f64, eta0: f64, u: f64) -> Result<Complex64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("α = {alpha} outside (1, 2)")));
    }
    if u == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tol = Tolerance::new(1e-14, 1e-12);
    let iu = Complex64::new(0.0, u);
    // (e^{-iuz} - 1 + iuz) / z²
    let ratio = |z: f64| -> Complex64 {
        let w = -iu * z;
        if w.norm() < 1e-3 {
            // (e^w - 1 - w)/z² = (w²/2 + w³/6 + w⁴/24) / z²
            (w * w * (0.5 + w / 6.0 + w * w / 24.0)) / (z * z)
        } else {
            (w.exp() - 1.0 - w) / (z * z)
        }
    };
    let a = 2.0 - alpha;
    let near = integrate(|v: f64| ratio(v.powf(1.0 / a)), 0.0, 1.0, tol)? / a;
    let poly = Complex64::new(-1.0 / alpha, 0.0) + iu / (alpha - 1.0);
    let big_z = f64::max(2000.0, 500.0 / u.abs());
    let period = 2.0 * std::f64::consts::PI / u.abs();
    let osc = |z: f64| (-iu * z).exp() * z.powf(-1.0 - alpha);
    let mut lo = 1.0;
    let mut body = Complex64::new(0.0, 0.0);
    while lo < big_z {
        let hi = (lo + period).min(big_z);
        body += integrate(osc, lo, hi, tol)?;
        lo = hi;
    }
    let tail = (-iu * big_z).exp()
        * (big_z.powf(-1.0 - alpha) / iu + (1.0 + alpha) * big_z.powf(-2.0 - alpha) / (iu * iu));
    Ok(eta0 * (near + poly + body + tail))
}
