use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::quadrature::{integrate, Tolerance};

/// Discretization settings. `half_width` overrides the default log-price
/// half-width of eight standard deviations of `X_T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_t: usize,
    pub theta_min: f64,
    pub epsilon: f64,
    pub half_width: Option<f64>,
    /// Jumps within this many cells below a node are solved implicitly.
    pub band: usize,
    /// Largest allowed `Δθ · Λ_explicit`.
    pub explicit_cfl: f64,
}

impl GridSpec {
    pub fn new(n_x: usize, n_t: usize, theta_min: f64, epsilon: f64) -> Self {
        GridSpec { n_x, n_t, theta_min, epsilon, half_width: None, band: 64, explicit_cfl: 0.25 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    pub n_x: usize,
    pub dx: f64,
    /// Leftmost node at `θ = 0`; later slices drift by the moving-frame offset.
    pub x0: f64,
    pub thetas: Vec<f64>,
    pub epsilon: f64,
    /// Lumped jump weights `w_k` at offsets `k Δx`, nonzero entries only.
    pub jump_offsets: Vec<i64>,
    pub jump_weights: Vec<f64>,
    pub sigma_eps: f64,
    /// Base diffusion coefficient: `(σ² + σ_ε² + sub-cell jump variance - lumping excess)/2`.
    pub diffusion: f64,
    /// Moving-frame drift of the log-price.
    pub drift: f64,
    /// `D + μ + Σ w_k (e^{kΔx} - 1) - (r - δ)`, zero up to rounding.
    pub martingale_residual: f64,
    /// Variance rate the diffusion could not absorb: lumping excess plus the
    /// time-averaged step excess.
    pub variance_mismatch: f64,
    pub band: usize,
    /// Diffusion coefficient per time step after the variance correction.
    pub step_diffusion: Vec<f64>,
    /// Frame displacement per slice. Each step advances by the amount that
    /// makes `e^{x - δθ}` an exact solution of the discrete scheme.
    pub shifts: Vec<f64>,
}

impl Grid {
    /// Node `j` at slice `n`.
    pub fn node(&self, n: usize, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx + self.frame_offset(n).1
    }

    /// Whole-cell shift and fractional offset of the moving frame at slice `n`.
    /// Lattice points travel at `-drift` so that the transformed price has no
    /// first-order term.
    pub fn frame_offset(&self, n: usize) -> (i64, f64) {
        let s = self.shifts[n];
        let m = (s / self.dx).floor();
        (m as i64, s - m * self.dx)
    }

    fn in_band(&self, k: i64) -> bool {
        k < 0 && k >= -(self.band as i64)
    }

    /// First moments `Σ w_k kΔx` of the implicit band and of the rest.
    pub fn jump_means(&self) -> (f64, f64) {
        let (mut near, mut far) = (0.0, 0.0);
        for (&k, &w) in self.jump_offsets.iter().zip(&self.jump_weights) {
            let y = w * k as f64 * self.dx;
            if self.in_band(k) { near += y } else { far += y }
        }
        (near, far)
    }

    /// Total intensity of weights outside the implicit band.
    pub fn explicit_intensity(&self) -> f64 {
        self.jump_offsets
            .iter()
            .zip(&self.jump_weights)
            .filter(|(&k, _)| !self.in_band(k))
            .map(|(_, w)| w)
            .sum()
    }
}

pub fn build_grid(model: &LevyModel, spec: &GridSpec) -> Result<Grid> {
    let m = &model.market;
    if spec.n_x < 200 || spec.n_t < 100 {
        return Err(Error::Config(format!("grid needs n_x ≥ 200 and n_t ≥ 100, got {} and {}", spec.n_x, spec.n_t)));
    }
    if !(spec.theta_min > 0.0) || spec.theta_min >= m.maturity {
        return Err(Error::Config(format!("theta_min must lie in (0, T), got {}", spec.theta_min)));
    }
    let nu = &model.nu;
    let infinite = nu.total_mass().is_none();
    if infinite && !(spec.epsilon > 0.0) {
        return Err(Error::Config("infinite-activity measure needs epsilon > 0".into()));
    }
    let eps = spec.epsilon.max(0.0);
    let qv = model.sigma * model.sigma + nu.quadratic_variation()?;
    let sigma_eps2 = if eps > 0.0 && !nu.is_zero() { nu.small_jump_variance(eps * (1.0 - 1e-15))? } else { 0.0 };
    if sigma_eps2 > 0.5 * qv {
        return Err(Error::Config(format!(
            "epsilon too large: small-jump variance {sigma_eps2:.3e} exceeds half the quadratic variation {qv:.3e}"
        )));
    }

    let sd = (qv * m.maturity).sqrt();
    let centre = m.strike.ln();
    let mut half = spec.half_width.unwrap_or(8.0 * sd);
    half = half.max((m.spot / m.strike).ln().abs() * 1.25);
    if !(half > 0.0) || !half.is_finite() {
        return Err(Error::Config(format!("invalid domain half-width {half}")));
    }
    let dx = 2.0 * half / spec.n_x as f64;
    let x0 = centre - half;

    let (offsets, weights, folded) = lump(model, eps, dx)?;
    let lumped_var: f64 = offsets.iter().zip(&weights).map(|(&k, w)| w * (k as f64 * dx).powi(2)).sum();
    let exact_var = if nu.is_zero() { 0.0 } else { qv - model.sigma * model.sigma - sigma_eps2 - folded };
    let excess = lumped_var - exact_var;
    let local_var = model.sigma * model.sigma + sigma_eps2 + folded;
    let (diffusion, mismatch) = if excess <= local_var {
        (0.5 * (local_var - excess).max(0.0), 0.0)
    } else {
        (0.0, excess - local_var)
    };
    let jump_exp: f64 = offsets.iter().zip(&weights).map(|(&k, w)| w * (k as f64 * dx).exp_m1()).sum();
    let drift = m.r - m.delta - diffusion - jump_exp;
    let martingale_residual = diffusion + drift + jump_exp - (m.r - m.delta);

    let mut grid = Grid {
        n_x: spec.n_x,
        dx,
        x0,
        thetas: Vec::new(),
        epsilon: eps,
        jump_offsets: offsets,
        jump_weights: weights,
        sigma_eps: sigma_eps2.sqrt(),
        diffusion,
        drift,
        martingale_residual,
        variance_mismatch: mismatch,
        band: spec.band.min(spec.n_x / 4),
        step_diffusion: Vec::new(),
        shifts: Vec::new(),
    };
    // Implicit Euler on jumps with mean m_b adds (Δθ m_b)² of variance per
    // step and the explicit part removes (Δθ m_f)²; the diffusion pays for it.
    let (m_b, m_f) = grid.jump_means();
    let spread = m_b * m_b - m_f * m_f;
    let explicit = grid.explicit_intensity();
    let mut max_step = if explicit > 0.0 { spec.explicit_cfl / explicit } else { f64::INFINITY };
    if spread > 0.0 && diffusion > 0.0 {
        max_step = max_step.min(2.0 * diffusion / spread);
    }
    grid.thetas = time_nodes(m.maturity, spec.theta_min, spec.n_t, max_step);
    let mut unmatched = 0.0;
    for w in grid.thetas.windows(2) {
        let dt = w[1] - w[0];
        let d = diffusion - 0.5 * dt * spread;
        if d < 0.0 {
            unmatched += -2.0 * d * dt;
        }
        grid.step_diffusion.push(d.max(0.0));
    }
    grid.variance_mismatch += unmatched / m.maturity;
    grid.shifts = frame_shifts(&grid, m.r, m.delta);
    Ok(grid)
}

/// Cumulative frame displacement. On `e^z` the implicit side multiplies by
/// `1 + Δθ q` and the lagged far jumps by `1 + Δθ F`; advancing the frame by
/// `δΔθ + ln((1 + Δθ F)/(1 + Δθ q))` leaves `e^{x - δθ}` invariant.
fn frame_shifts(grid: &Grid, r: f64, delta: f64) -> Vec<f64> {
    let dx = grid.dx;
    let lam: f64 = grid.jump_weights.iter().sum();
    let c2 = 2.0 * (dx.cosh() - 1.0) / (dx * dx);
    let (mut near, mut far) = (0.0, 0.0);
    for (&k, &w) in grid.jump_offsets.iter().zip(&grid.jump_weights) {
        let g = w * (k as f64 * dx).exp();
        if grid.in_band(k) { near += g } else { far += g }
    }
    let mut out = Vec::with_capacity(grid.thetas.len());
    let mut s = 0.0;
    out.push(0.0);
    for (w, d) in grid.thetas.windows(2).zip(&grid.step_diffusion) {
        let dt = w[1] - w[0];
        let q = r + lam - d * c2 - near;
        s += delta * dt + ((dt * far).ln_1p() - (dt * q).ln_1p());
        out.push(s);
    }
    out
}

/// Hat-function lumping of ν restricted to `|y| ≥ ε` onto multiples of `dx`.
/// Density mass below one cell is returned as variance instead: a hat puts
/// variance `|y| dx` on a jump of size `y`, far above `y²`.
fn lump(model: &LevyModel, eps: f64, dx: f64) -> Result<(Vec<i64>, Vec<f64>, f64)> {
    use std::collections::BTreeMap;
    let mut w: BTreeMap<i64, f64> = BTreeMap::new();
    let add = |w: &mut BTreeMap<i64, f64>, y: f64, mass: f64| {
        let t = y / dx;
        let k = t.floor();
        let frac = t - k;
        *w.entry(k as i64).or_default() += mass * (1.0 - frac);
        *w.entry(k as i64 + 1).or_default() += mass * frac;
    };
    let tol = Tolerance::new(1e-16, 1e-10);
    let mut folded = 0.0;
    for c in model.nu.components() {
        for a in c.atoms() {
            if a.location.abs() >= eps {
                add(&mut w, a.location, a.intensity);
            }
        }
        if !c.has_density() {
            continue;
        }
        let (lo, hi) = c.truncation(1e-10);
        let cut = eps.max(dx);
        if cut > eps {
            for (a, b) in [(lo.max(-cut), -eps.max(1e-300)), (eps.max(1e-300), hi.min(cut))] {
                if b > a {
                    folded += integrate(|y: f64| c.density(y) * y * y, a, b, tol)?;
                }
            }
        }
        let mut ranges = Vec::new();
        if lo < -cut {
            ranges.push((lo, -cut));
        }
        if hi > cut {
            ranges.push((cut, hi));
        }
        for (a, b) in ranges {
            let k_start = (a / dx).floor() as i64;
            let k_end = (b / dx).ceil() as i64;
            for k in k_start..k_end {
                let left = (k as f64 * dx).max(a);
                let right = ((k + 1) as f64 * dx).min(b);
                if right <= left {
                    continue;
                }
                let base = k as f64 * dx;
                let m0 = integrate(|y: f64| c.density(y), left, right, tol)?;
                let m1 = integrate(|y: f64| c.density(y) * (y - base) / dx, left, right, tol)?;
                *w.entry(k).or_default() += m0 - m1;
                *w.entry(k + 1).or_default() += m1;
            }
        }
    }
    w.remove(&0);
    let (offsets, weights): (Vec<i64>, Vec<f64>) = w.into_iter().filter(|(_, v)| *v > 0.0).unzip();
    Ok((offsets, weights, folded))
}

/// Twenty slices on `[0, θ_min]` with the first four at half width, then a
/// geometric progression up to `T`; steps longer than `max_step` are
/// subdivided.
pub fn time_nodes(maturity: f64, theta_min: f64, n_t: usize, max_step: f64) -> Vec<f64> {
    let h = theta_min / 20.0;
    let mut steps = vec![0.5 * h; 4];
    steps.extend(std::iter::repeat_n(h, 18));
    let n_geo = n_t.saturating_sub(steps.len()).max(1);
    let remaining = maturity - theta_min;
    let total = |q: f64| -> f64 {
        if (q - 1.0).abs() < 1e-12 {
            h * n_geo as f64
        } else {
            h * q * (q.powi(n_geo as i32) - 1.0) / (q - 1.0)
        }
    };
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    while total(hi) < remaining {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < remaining {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    let mut theta = theta_min;
    let mut geo = Vec::with_capacity(n_geo);
    for j in 1..=n_geo {
        let next = if j == n_geo { maturity } else { (theta + h * q.powi(j as i32)).min(maturity) };
        geo.push(next - theta);
        theta = next;
    }
    steps.extend(geo.into_iter().filter(|&s| s > 0.0));

    let cap = max_step;
    let mut nodes = vec![0.0];
    let mut t = 0.0;
    for s in steps {
        let pieces = (s / cap).ceil().max(1.0) as usize;
        for _ in 0..pieces {
            t += s / pieces as f64;
            nodes.push(t);
        }
    }
    *nodes.last_mut().expect("nonempty") = maturity;
    nodes
}
