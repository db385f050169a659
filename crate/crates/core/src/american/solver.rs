//! Backward induction in time-to-maturity on a log-price lattice that moves
//! with the drift, so no first-derivative term is discretized.
//!
//! Per step: `(1 + Δθ(r + Λ) - Δθ D δ²) u - Δθ Σ_{band} w_k u_{·+k} = u_old + Δθ Σ_{far} w_k u_old_{·+k}`
//! with the band of nearby negative jumps implicit and the rest lagged. The
//! European companion uses the same operator without the obstacle.

use serde::Serialize;

use super::boundary::{european_crossing, exercise_boundary, BoundaryCurve};
use super::grid::Grid;
use super::jumps::ExplicitJumps;
use super::lcp::{lcp_solver, BandedSystem, LcpSolver, Workspace};
use crate::error::{Error, Result};
use crate::io::{num, Table};
use crate::model::LevyModel;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub lcp: String,
    /// Exercise detection threshold relative to `K`.
    pub boundary_tol: f64,
    /// Slices to keep, by nearest `θ`. The final slice is always kept.
    pub store_thetas: Vec<f64>,
    /// Additionally keep every `n`-th slice.
    pub store_every: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { lcp: "brennan_schwartz".into(), boundary_tol: 1e-8, store_thetas: Vec::new(), store_every: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Slice {
    pub index: usize,
    pub theta: f64,
    pub x: Vec<f64>,
    pub american: Vec<f64>,
    pub european: Vec<f64>,
    pub payoff: Vec<f64>,
}

impl Slice {
    /// `P - P_e` on the grid.
    pub fn premium(&self) -> Vec<f64> {
        self.american.iter().zip(&self.european).map(|(a, e)| a - e).collect()
    }

    /// Linear interpolation in log-price; `None` outside the slice.
    pub fn american_at(&self, x: f64) -> Option<f64> {
        lerp(&self.x, &self.american, x)
    }

    pub fn european_at(&self, x: f64) -> Option<f64> {
        lerp(&self.x, &self.european, x)
    }
}

fn lerp(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let n = xs.len();
    if n < 2 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    let dx = xs[1] - xs[0];
    let j = (((x - xs[0]) / dx).floor() as usize).min(n - 2);
    let t = (x - xs[j]) / dx;
    Some(ys[j] + t * (ys[j + 1] - ys[j]))
}

/// Worst violations over all slices and nodes, in currency units. Convexity
/// and monotonicity are checked on the inner three quarters of the domain.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub below_payoff: f64,
    pub below_european: f64,
    pub convexity: f64,
    pub increasing_in_x: f64,
    pub decreasing_in_theta: f64,
    pub complementarity: f64,
    pub european_residual: f64,
    /// `P - P_e` outside `[0, rK θ]`.
    pub premium_bound: f64,
    /// Largest increase of `P - P_e` in `x`.
    pub premium_increasing: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PriceSurface {
    pub strike: f64,
    pub r: f64,
    pub thetas: Vec<f64>,
    pub dx: f64,
    pub slices: Vec<Slice>,
    pub boundary: BoundaryCurve,
    pub diagnostics: Diagnostics,
    pub lcp: String,
}

impl PriceSurface {
    pub const HEADER: [&'static str; 5] = ["theta", "x", "american", "european", "premium"];

    pub fn last(&self) -> &Slice {
        self.slices.last().expect("final slice is always stored")
    }

    /// American value at spot `s` and maturity.
    pub fn american_price(&self, spot: f64) -> Option<f64> {
        self.last().american_at(spot.ln())
    }

    pub fn european_price(&self, spot: f64) -> Option<f64> {
        self.last().european_at(spot.ln())
    }

    /// Stored slice closest to `θ`.
    pub fn slice_near(&self, theta: f64) -> &Slice {
        self.slices
            .iter()
            .min_by(|a, b| (a.theta - theta).abs().total_cmp(&(b.theta - theta).abs()))
            .expect("nonempty")
    }

    /// Rows with `x` in `[x_lo, x_hi]`, every `stride`-th node.
    pub fn table(&self, x_lo: f64, x_hi: f64, stride: usize) -> Table {
        let mut t = Table::new(&Self::HEADER);
        for s in &self.slices {
            for j in (0..s.x.len()).step_by(stride.max(1)) {
                if s.x[j] < x_lo || s.x[j] > x_hi {
                    continue;
                }
                t.push(vec![
                    num(s.theta),
                    num(s.x[j]),
                    num(s.american[j]),
                    num(s.european[j]),
                    num(s.american[j] - s.european[j]),
                ]);
            }
        }
        t
    }
}

struct Side {
    u: Vec<f64>,
    rhs: Vec<f64>,
    ext: Vec<f64>,
    jump: Vec<f64>,
    work: Workspace,
}

impl Side {
    fn new(n: usize, ext: usize) -> Self {
        Side { u: vec![0.0; n], rhs: vec![0.0; n], ext: vec![0.0; ext], jump: vec![0.0; n], work: Workspace::default() }
    }
}

pub fn solve_variational_inequality(model: &LevyModel, grid: &Grid, opts: &SolverOptions) -> Result<PriceSurface> {
    let solver = lcp_solver(&opts.lcp)?;
    solve_with(model, grid, opts, solver.as_ref())
}

pub fn solve_with(model: &LevyModel, grid: &Grid, opts: &SolverOptions, lcp: &dyn LcpSolver) -> Result<PriceSurface> {
    let m = &model.market;
    let k = m.strike;
    let n = grid.n_x + 1;
    let dx = grid.dx;
    let p = grid.band.max(1);

    // split lumped weights into implicit band and explicit remainder
    let mut band_w = vec![0.0; p];
    let (mut far_k, mut far_w) = (Vec::new(), Vec::new());
    for (&off, &w) in grid.jump_offsets.iter().zip(&grid.jump_weights) {
        if off < 0 && (-off) as usize <= grid.band {
            band_w[(-off - 1) as usize] += w;
        } else {
            far_k.push(off);
            far_w.push(w);
        }
    }
    let lam_total: f64 = grid.jump_weights.iter().sum();
    let mut far = ExplicitJumps::new(n, &far_k, &far_w);
    let ext_len = far.ext_len();

    let left_am = |x: f64, _t: f64| k - x.exp();
    let left_eu = |x: f64, t: f64| k * (-m.r * t).exp() - (x - m.delta * t).exp();

    let mut am = Side::new(n, ext_len);
    let mut eu = Side::new(n, ext_len);
    let x_at = |slice: usize| -> Vec<f64> { (0..n).map(|j| grid.node(slice, j)).collect() };
    let mut x = x_at(0);
    let mut psi: Vec<f64> = x.iter().map(|v| (k - v.exp()).max(0.0)).collect();
    am.u.copy_from_slice(&psi);
    eu.u.copy_from_slice(&psi);

    let steps = grid.thetas.len() - 1;
    let mut keep = vec![false; steps + 1];
    keep[steps] = true;
    keep[0] = true;
    if let Some(every) = opts.store_every {
        for (i, slot) in keep.iter_mut().enumerate() {
            if every > 0 && i % every == 0 {
                *slot = true;
            }
        }
    }
    for &t in &opts.store_thetas {
        let i = grid
            .thetas
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        keep[i] = true;
    }

    let mut slices = Vec::new();
    let mut diag = Diagnostics::default();
    let mut curve = BoundaryCurve::new(k, dx);
    curve.push(0.0, Some(k), Some(k));
    if keep[0] {
        slices.push(Slice { index: 0, theta: 0.0, x: x.clone(), american: am.u.clone(), european: eu.u.clone(), payoff: psi.clone() });
    }

    let mut sys = BandedSystem::new(n, p);
    let mut prev_x = x.clone();
    let mut prev_am = am.u.clone();

    for step in 0..steps {
        let (t_old, t_new) = (grid.thetas[step], grid.thetas[step + 1]);
        let dt = t_new - t_old;
        let (m_old, f_old) = grid.frame_offset(step);
        let (m_new, f_new) = grid.frame_offset(step + 1);
        let dm = m_new - m_old;
        let pos_old = |j: i64| grid.x0 + j as f64 * dx + f_old - dm as f64 * dx;
        let pos_new = |j: i64| grid.x0 + j as f64 * dx + f_new;

        // re-index onto the new window
        for (side, left) in [(&mut am, &left_am as &dyn Fn(f64, f64) -> f64), (&mut eu, &left_eu)] {
            shift(&mut side.u, dm, |j| left(pos_old(j), t_old));
        }

        // lagged far jumps
        if !far.is_empty() {
            for (side, left) in [(&mut am, &left_am as &dyn Fn(f64, f64) -> f64), (&mut eu, &left_eu)] {
                for (t, slot) in side.ext.iter_mut().enumerate() {
                    let j = t as i64 + far.k_min;
                    *slot = if j < 0 {
                        left(pos_old(j), t_old)
                    } else if (j as usize) < n {
                        side.u[j as usize]
                    } else {
                        0.0
                    };
                }
            }
            far.apply2(&am.ext, &eu.ext, &mut am.jump, &mut eu.jump);
        }

        // operator rows
        let d_coef = grid.step_diffusion[step] / (dx * dx);
        let diag_int = 1.0 + dt * (m.r + lam_total) + 2.0 * dt * d_coef;
        for j in 0..n {
            let row = &mut sys.sub[j * p..(j + 1) * p];
            if j == 0 || j == n - 1 {
                sys.diag[j] = 1.0;
                sys.sup[j] = 0.0;
                row.iter_mut().for_each(|a| *a = 0.0);
                continue;
            }
            sys.diag[j] = diag_int;
            sys.sup[j] = -dt * d_coef;
            for (kk, a) in row.iter_mut().enumerate() {
                *a = -dt * band_w[kk];
            }
            row[0] -= dt * d_coef;
        }
        for (side, left) in [(&mut am, &left_am as &dyn Fn(f64, f64) -> f64), (&mut eu, &left_eu)] {
            for j in 1..n - 1 {
                let mut r = side.u[j] + dt * if far.is_empty() { 0.0 } else { side.jump[j] };
                // band entries reaching left of the window use Dirichlet data
                for kk in j..p {
                    let a = sys.sub[j * p + kk];
                    if a != 0.0 {
                        r -= a * left(pos_new(j as i64 - kk as i64 - 1), t_new);
                    }
                }
                side.rhs[j] = r;
            }
            side.rhs[0] = left(pos_new(0), t_new);
            side.rhs[n - 1] = 0.0;
        }
        for j in 1..n - 1 {
            for kk in j..p {
                sys.sub[j * p + kk] = 0.0;
            }
        }

        x = x_at(step + 1);
        for (v, xi) in psi.iter_mut().zip(&x) {
            *v = (k - xi.exp()).max(0.0);
        }
        let (ra, re) = rayon::join(
            || lcp.solve(&sys, &am.rhs, Some(&psi), &mut am.u, &mut am.work),
            || lcp.solve(&sys, &eu.rhs, None, &mut eu.u, &mut eu.work),
        );
        ra.map_err(|e| Error::Numerical(format!("θ = {t_new:e}: {e}")))?;
        re.map_err(|e| Error::Numerical(format!("θ = {t_new:e} (European): {e}")))?;

        diag.complementarity = diag.complementarity.max(sys.complementarity_residual(&am.u, &am.rhs, Some(&psi)));
        diag.european_residual = diag.european_residual.max(sys.complementarity_residual(&eu.u, &eu.rhs, None));
        check_slice(&mut diag, &x, &am.u, &eu.u, &psi, &prev_x, &prev_am, m.r * k * t_new);

        let b = exercise_boundary(&x, &am.u, &psi, k, opts.boundary_tol * k);
        let b_e = european_crossing(&x, &eu.u, k);
        curve.push(t_new, b, b_e);

        if keep[step + 1] {
            slices.push(Slice {
                index: step + 1,
                theta: t_new,
                x: x.clone(),
                american: am.u.clone(),
                european: eu.u.clone(),
                payoff: psi.clone(),
            });
        }
        prev_x.copy_from_slice(&x);
        prev_am.copy_from_slice(&am.u);
    }

    Ok(PriceSurface {
        strike: k,
        r: m.r,
        thetas: grid.thetas.clone(),
        dx,
        slices,
        boundary: curve,
        diagnostics: diag,
        lcp: lcp.name().into(),
    })
}

/// `new[j] = old[j - dm]`, filling from the left with `left(j)` (indices in
/// the old frame relative to the new window) and from the right with zero.
fn shift(u: &mut [f64], dm: i64, left: impl Fn(i64) -> f64) {
    let n = u.len() as i64;
    if dm == 0 {
        return;
    }
    if dm > 0 {
        for j in (0..n).rev() {
            let src = j - dm;
            u[j as usize] = if src >= 0 { u[src as usize] } else { left(j) };
        }
    } else {
        for j in 0..n {
            let src = j - dm;
            u[j as usize] = if src < n { u[src as usize] } else { 0.0 };
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_slice(
    d: &mut Diagnostics,
    x: &[f64],
    am: &[f64],
    eu: &[f64],
    psi: &[f64],
    prev_x: &[f64],
    prev_am: &[f64],
    premium_cap: f64,
) {
    let n = x.len();
    // shape checks skip the outer quarter on each side, where the imposed
    // far-field values dominate
    let centre = 0.5 * (x[0] + x[n - 1]);
    let reach = 0.75 * 0.5 * (x[n - 1] - x[0]);
    let inner = |j: usize| (x[j] - centre).abs() <= reach;
    for j in 0..n {
        d.below_payoff = d.below_payoff.max(psi[j] - am[j]);
        d.below_european = d.below_european.max(eu[j] - am[j]);
        let prem = am[j] - eu[j];
        d.premium_bound = d.premium_bound.max(-prem).max(prem - premium_cap);
        if j + 1 < n {
            if inner(j) {
                d.increasing_in_x = d.increasing_in_x.max(am[j + 1] - am[j]);
            }
            d.premium_increasing = d.premium_increasing.max((am[j + 1] - eu[j + 1]) - prem);
        }
        if j > 0 && j + 1 < n && inner(j) {
            // convex in S = e^x: slopes in S must not decrease
            let (s0, s1, s2) = (x[j - 1].exp(), x[j].exp(), x[j + 1].exp());
            let bend = (am[j + 1] - am[j]) / (s2 - s1) - (am[j] - am[j - 1]) / (s1 - s0);
            d.convexity = d.convexity.max(-bend * 0.5 * (s2 - s0));
        }
    }
    // monotonicity in θ: previous slice is convex in S, so secant extensions
    // of neighbouring cells bound it from below at the new nodes
    let h = prev_x[1] - prev_x[0];
    for j in (1..n - 1).filter(|&j| inner(j)) {
        let c = (((x[j] - prev_x[0]) / h).floor() as i64).clamp(1, n as i64 - 3) as usize;
        let line = |a: usize, xx: f64| {
            let (sa, sb) = (prev_x[a].exp(), prev_x[a + 1].exp());
            prev_am[a] + (prev_am[a + 1] - prev_am[a]) * (xx.exp() - sa) / (sb - sa)
        };
        let lower = line(c - 1, x[j]).max(line(c + 1, x[j]));
        d.decreasing_in_theta = d.decreasing_in_theta.max(lower - am[j]);
    }
}
