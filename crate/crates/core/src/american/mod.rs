//! American put by a discretized variational inequality, its exercise
//! boundary, and the early-exercise-premium decomposition.

mod binomial;
mod boundary;
mod grid;
mod jumps;
pub mod lcp;
mod solver;

use serde::Serialize;

pub use binomial::binomial_put;
pub use boundary::{european_crossing, exercise_boundary, BoundaryCurve};
pub use grid::{build_grid, time_nodes, Grid, GridSpec};
pub use lcp::{lcp_solver, BrennanSchwartz, LcpSolver, Psor, LCP_SOLVERS};
pub use solver::{solve_variational_inequality, solve_with, Diagnostics, PriceSurface, Slice, SolverOptions};

use crate::error::{Error, Result};
use crate::model::{LevyModel, ModelClass};
use crate::simulation::{chunked, mean_stderr, EpsPolicy, IncrementSampler};

/// Solve and extract in one call.
pub fn price_american(model: &LevyModel, spec: &GridSpec, opts: &SolverOptions) -> Result<PriceSurface> {
    let grid = build_grid(model, spec)?;
    solve_variational_inequality(model, &grid, opts)
}

#[derive(Debug, Clone, Copy)]
pub struct EepOptions {
    pub n_paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub epsilon: EpsPolicy,
}

impl Default for EepOptions {
    fn default() -> Self {
        EepOptions { n_paths: 20_000, steps: 400, seed: 0, epsilon: EpsPolicy::Fixed(0.01) }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EepEstimate {
    pub theta: f64,
    pub spot: f64,
    pub value: f64,
    pub stderr: f64,
}

/// `e(θ, x) = E ∫_0^θ e^{-rs} k(θ - s, S_s) ds` with
/// `k(τ, S) = [rK - δS - ∫_{y>0} (P(τ, S e^y) - (K - S e^y)) ν(dy)] 1_{S < b(τ)}`.
/// The inner `P` is read from the nearest stored slice of `surface`.
pub fn eep_premium(model: &LevyModel, surface: &PriceSurface, theta: f64, spot: f64, opts: &EepOptions) -> Result<EepEstimate> {
    if model.classify() == ModelClass::TypeA {
        return Err(Error::NotApplicable("the premium representation is stated for infinite-activity models".into()));
    }
    let curve = &surface.boundary;
    let ds = theta / opts.steps as f64;
    let mut bounds = Vec::with_capacity(opts.steps + 1);
    for i in 0..=opts.steps {
        let tau = (theta - i as f64 * ds).max(0.0);
        let b = curve
            .b_at(tau)
            .ok_or_else(|| Error::Data(format!("boundary missing at θ = {tau:e}")))?;
        bounds.push(b);
    }
    let m = &model.market;
    let k = m.strike;
    let positive = model.nu.support().1 > 0.0;
    let jump_term = |tau: f64, s: f64, b: f64| -> f64 {
        if !positive {
            return 0.0;
        }
        let slice = surface.slice_near(tau);
        let from = (b / s).ln().max(0.0);
        model
            .nu
            .integrate(
                &|y: f64| {
                    let xs = s.ln() + y;
                    let p = slice.american_at(xs).unwrap_or(0.0);
                    (p - (k - xs.exp())).max(0.0)
                },
                from,
                f64::INFINITY,
                0,
            )
            .unwrap_or(f64::NAN)
    };

    let sampler = IncrementSampler::new(model, opts.epsilon.resolve(model, ds))?;
    let drift = (m.r - m.delta) * ds;
    let values = chunked(opts.n_paths, opts.seed, |rng| {
        let mut log_s = spot.ln();
        let mut acc = 0.0;
        let kernel = |i: usize, log_s: f64| -> f64 {
            let s = log_s.exp();
            let b = bounds[i];
            if s >= b {
                return 0.0;
            }
            let tau = theta - i as f64 * ds;
            (-m.r * i as f64 * ds).exp() * (m.r * k - m.delta * s - jump_term(tau, s, b))
        };
        let mut left = kernel(0, log_s);
        for i in 1..=opts.steps {
            log_s += drift + sampler.draw(ds, rng);
            let right = kernel(i, log_s);
            acc += 0.5 * (left + right) * ds;
            left = right;
        }
        acc
    });
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite premium sample".into()));
    }
    let (value, stderr) = mean_stderr(&values);
    Ok(EepEstimate { theta, spot, value, stderr })
}

#[derive(Debug, Clone, Serialize)]
pub struct EepBoundReport {
    /// Largest `P_e - P` (should be ≤ 0).
    pub below_european: f64,
    /// Largest excursion of `P - P_e` outside `[0, rKθ]`.
    pub bound_violation: f64,
    /// Largest increase of `P - P_e` between neighbouring nodes.
    pub monotone_violation: f64,
    pub passed: bool,
}

/// `0 ≤ P - P_e ≤ rKθ` at every node and `P - P_e` nonincreasing in `x` to `1e-7 K`.
pub fn eep_bound_check(surface: &PriceSurface) -> EepBoundReport {
    let d = &surface.diagnostics;
    let tol = 1e-7 * surface.strike;
    let passed = d.below_european <= tol && d.premium_bound <= tol && d.premium_increasing <= tol;
    EepBoundReport {
        below_european: d.below_european,
        bound_violation: d.premium_bound,
        monotone_violation: d.premium_increasing,
        passed,
    }
}
