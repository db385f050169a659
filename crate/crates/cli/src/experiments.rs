//! Experiments selectable by name. Each writes its artifacts into the
//! output directory and records assertions into the run summary.

use std::path::Path;

use levy_put::american::{
    binomial_put, eep_bound_check, eep_premium, price_american, EepOptions, PriceSurface, SolverOptions,
};
use levy_put::asymptotics::{
    detect_regime, divergence_check, fit_boundary_rate, fit_european_rate, fits_table, prediction, Regime,
};
use levy_put::config::ExperimentConfig;
use levy_put::error::{Error, Result};
use levy_put::european::price_put_fourier;
use levy_put::model::{LevyModel, ModelClass};
use levy_put::simulation::{
    compensation_check, positive_part_growth, sim_table, small_time_drift_check, stable_limit_check, EpsPolicy,
    SimRow,
};
use levy_put::special::black_scholes_put;
use levy_put::verification::{surface_invariants, Assertion, Summary};

pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub out: &'a Path,
    pub seed: u64,
}

pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &Context, summary: &mut Summary) -> Result<()>;
}

pub static EXPERIMENTS: &[&dyn Experiment] = &[&Price, &Boundary, &Asympt, &SimCheck, &Verify];

pub fn experiment(name: &str) -> Result<&'static dyn Experiment> {
    EXPERIMENTS.iter().copied().find(|e| e.name() == name).ok_or_else(|| {
        let known: Vec<_> = EXPERIMENTS.iter().map(|e| e.name()).collect();
        Error::Config(format!("unknown experiment `{name}`; known: {}", known.join(", ")))
    })
}

/// Slices stored for surface.csv: ten evenly spaced maturities.
const SURFACE_SLICES: usize = 10;
/// Approximate nodes per slice in surface.csv.
const SURFACE_NODES: f64 = 100.0;

fn solve(cfg: &ExperimentConfig) -> Result<PriceSurface> {
    solve_model(cfg, &cfg.model)
}

/// Solve to the horizon `2 θ_hi` only; the boundary at a given `θ` does not
/// depend on the maturity.
fn solve_near_maturity(cfg: &ExperimentConfig) -> Result<PriceSurface> {
    let t = cfg.model.market.maturity;
    let horizon = (2.0 * cfg.window.1.max(1e-2) * t).min(t);
    if cfg.grid.theta_min >= horizon {
        return Err(Error::Config(format!("grid.theta_min must lie below the fit horizon {horizon:e}")));
    }
    solve_model(cfg, &cfg.model.with_maturity(horizon)?)
}

fn solve_model(cfg: &ExperimentConfig, model: &LevyModel) -> Result<PriceSurface> {
    let t = model.market.maturity;
    let opts = SolverOptions {
        lcp: cfg.solver.clone(),
        store_thetas: (1..=SURFACE_SLICES).map(|i| t * i as f64 / SURFACE_SLICES as f64).collect(),
        ..SolverOptions::default()
    };
    price_american(model, &cfg.grid, &opts)
}

fn write_surface(surface: &PriceSurface, out: &Path) -> Result<()> {
    let k = surface.strike.ln();
    let stride = (1.0 / surface.dx / SURFACE_NODES).ceil() as usize;
    surface.table(k - 0.5, k + 0.5, stride).write(&out.join("surface.csv"))
}

fn record_prices(cfg: &ExperimentConfig, surface: &PriceSurface, summary: &mut Summary) -> Result<()> {
    let spot = cfg.model.market.spot;
    let am = surface.american_price(spot).ok_or_else(|| Error::Data(format!("spot {spot} outside the grid")))?;
    let eu = surface.european_price(spot).ok_or_else(|| Error::Data(format!("spot {spot} outside the grid")))?;
    summary.record("american", am);
    summary.record("european", eu);
    summary.record("premium", am - eu);
    Ok(())
}

pub struct Price;

impl Experiment for Price {
    fn name(&self) -> &'static str {
        "price"
    }

    fn run(&self, ctx: &Context, summary: &mut Summary) -> Result<()> {
        let surface = solve(ctx.cfg)?;
        write_surface(&surface, ctx.out)?;
        surface.boundary.table().write(&ctx.out.join("boundary.csv"))?;
        record_prices(ctx.cfg, &surface, summary)?;
        let m = &ctx.cfg.model.market;
        let fourier = price_put_fourier(&ctx.cfg.model, m.spot, m.maturity)?.value;
        let pde = surface.european_price(m.spot).expect("checked above");
        summary.record("european_fourier", fourier);
        summary.push(Assertion::relative("european_pde_vs_fourier", pde, fourier, 0.01));
        summary.extend(surface_invariants(&surface));
        Ok(())
    }
}

pub struct Boundary;

impl Experiment for Boundary {
    fn name(&self) -> &'static str {
        "boundary"
    }

    fn run(&self, ctx: &Context, summary: &mut Summary) -> Result<()> {
        let surface = solve(ctx.cfg)?;
        surface.boundary.table().write(&ctx.out.join("boundary.csv"))?;
        let keep = ["boundary_positive", "boundary_ordering", "boundary_monotone_cells"];
        summary.extend(surface_invariants(&surface).into_iter().filter(|a| keep.contains(&a.name.as_str())));
        Ok(())
    }
}

pub struct Asympt;

impl Experiment for Asympt {
    fn name(&self) -> &'static str {
        "asympt"
    }

    fn run(&self, ctx: &Context, summary: &mut Summary) -> Result<()> {
        let cfg = ctx.cfg;
        let m = &cfg.model.market;
        let t = m.maturity;
        let surface = solve_near_maturity(cfg)?;
        let curve = &surface.boundary;
        curve.table().write(&ctx.out.join("boundary.csv"))?;
        let window = (cfg.window.0 * t, cfg.window.1 * t);
        let regime = detect_regime(&cfg.model)?;
        summary.record(format!("regime_{}", regime.tag()), 1.0);
        let mut fits = Vec::new();
        match regime {
            Regime::FiniteVariation { neg } => {
                let law = prediction(&regime, m)?;
                for fit in [fit_boundary_rate(curve, &law, window)?, fit_european_rate(curve, &law, window)?] {
                    fits.push(fit);
                }
                summary.push(Assertion::within("fv_exponent_american", fits[0].fitted_exponent, 1.0, 0.05));
                summary.push(Assertion::within("fv_exponent_european", fits[1].fitted_exponent, 1.0, 0.05));
                let dev = |pts: Vec<(f64, f64)>| {
                    pts.iter().map(|(th, b)| ((m.strike / b - 1.0) / th / neg - 1.0).abs()).fold(0.0, f64::max)
                };
                summary.push(Assertion::at_most("fv_slope_american", dev(curve.window(window.0, window.1)), 0.15));
                summary.push(Assertion::at_most("fv_slope_european", dev(curve.window_e(window.0, window.1)), 0.15));
                let div = divergence_check(curve, 1e-2 * t)?;
                summary.push(Assertion::within("fv_flat_growth", div.growth_factor, 1.0, 0.2));
            }
            Regime::TemperedStable { .. } => {
                let law = prediction(&regime, m)?;
                let fit = fit_boundary_rate(curve, &law, window)?;
                summary.push(Assertion::within("stable_exponent", fit.fitted_exponent, law.exponent, 0.1));
                summary.push(Assertion::relative("stable_constant", fit.fitted_constant, law.constant, 0.3));
                fits.push(fit);
                let div = divergence_check(curve, 1e-2 * t)?;
                summary.push(Assertion::at_least("stable_divergence", div.growth_factor, 3.0));
            }
            Regime::DiffusionDominated { .. } => {
                let law = prediction(&regime, m)?;
                let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
                    .iter()
                    .map(|f| {
                        let th = f * t;
                        curve.b_at(th).map(|b| (m.strike - b) / law.gap(th)).ok_or_else(|| {
                            Error::Data(format!("boundary missing at θ = {th:e}"))
                        })
                    })
                    .collect::<Result<_>>()?;
                for (f, r) in [1e-2, 1e-3, 1e-4].iter().zip(&ratios) {
                    summary.record(format!("diffusion_ratio_{f:e}"), *r);
                }
                summary.push(Assertion::between("diffusion_ratio", ratios[2], 0.5, 1.2));
                summary.push(Assertion::holds("diffusion_ratio_nondecreasing", ratios.windows(2).all(|w| w[1] >= w[0])));
                if let Ok(fit) = fit_boundary_rate(curve, &law, window) {
                    fits.push(fit);
                }
            }
            Regime::LimitBelowStrike { xi } => {
                let theta_min = cfg.grid.theta_min;
                let b = curve.b_at(theta_min).ok_or_else(|| Error::Data("boundary missing at θ_min".into()))?;
                summary.push(Assertion::relative("limit_below_strike", b, xi, 0.02));
            }
            Regime::InfiniteVariationOther => {
                let div = divergence_check(curve, 1e-2 * t)?;
                summary.record("growth_factor", div.growth_factor);
            }
        }
        fits_table(&fits).write(&ctx.out.join("fits.csv"))?;
        Ok(())
    }
}

pub struct SimCheck;

impl Experiment for SimCheck {
    fn name(&self) -> &'static str {
        "simcheck"
    }

    fn run(&self, ctx: &Context, summary: &mut Summary) -> Result<()> {
        let model = &ctx.cfg.model;
        let sim = &ctx.cfg.sim;
        let eps = EpsPolicy::Scaled(sim.eps_scale);
        let mut rows: Vec<SimRow> = Vec::new();
        if !model.nu.is_zero() {
            let t = sim.ladder[0];
            let tests: [(&str, &(dyn Fn(f64) -> f64 + Sync)); 2] = [("count", &|_| 1.0), ("square", &|y| y * y)];
            for (i, (name, f)) in tests.into_iter().enumerate() {
                let r = compensation_check(model, f, t, sim.n, ctx.seed.wrapping_add(i as u64), eps)?;
                summary.push(Assertion::at_most(format!("compensation_{name}_zscore"), r.row.zscore.abs(), 3.0));
                rows.push(r.row);
            }
        }
        if model.nu.finite_variation() && !model.nu.is_zero() {
            let r = small_time_drift_check(model, &sim.ladder, sim.n, ctx.seed.wrapping_add(10), eps)?;
            summary.push(Assertion::holds("drift_median_stabilized", r.stabilized));
            rows.extend(r.medians);
            rows.extend(r.means);
        }
        let growth = positive_part_growth(model, &sim.ladder, sim.n, ctx.seed.wrapping_add(20), eps)?;
        summary.record("positive_part_exponent", growth.fitted_exponent);
        if let Some(ratio) = growth.benchmark_ratio {
            summary.push(Assertion::within("positive_part_gaussian_ratio", ratio, 1.0, 0.05));
        }
        rows.extend(growth.rows);
        if let Regime::TemperedStable { alpha, .. } = detect_regime(model)? {
            summary.push(Assertion::within(
                "positive_part_stable_exponent",
                growth.fitted_exponent,
                -(1.0 - 1.0 / alpha),
                0.15,
            ));
            let r = stable_limit_check(model, &sim.ladder, sim.n, &sim.u_grid(), ctx.seed.wrapping_add(30), eps)?;
            let last = r.rows.last().expect("nonempty ladder").estimate;
            summary.push(Assertion::at_most("stable_limit_sup_error", last, 0.05));
            summary.push(Assertion::holds("stable_limit_nonincreasing", r.nonincreasing));
            rows.extend(r.rows);
        }
        sim_table(&rows).write(&ctx.out.join("simreport.csv"))
    }
}

/// Interior points for the premium identity.
const EEP_POINTS: [(f64, f64); 4] = [(0.25, 0.9), (0.5, 0.95), (0.5, 1.0), (1.0, 1.05)];

pub struct Verify;

impl Experiment for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn run(&self, ctx: &Context, summary: &mut Summary) -> Result<()> {
        let cfg = ctx.cfg;
        let m = &cfg.model.market;
        let surface = solve(cfg)?;
        write_surface(&surface, ctx.out)?;
        surface.boundary.table().write(&ctx.out.join("boundary.csv"))?;
        record_prices(cfg, &surface, summary)?;
        summary.extend(surface_invariants(&surface));
        let eep = eep_bound_check(&surface);
        summary.push(Assertion::at_most("premium_nonnegative", eep.below_european, 1e-7 * m.strike));
        summary.push(Assertion::at_most("premium_bound", eep.bound_violation, 1e-7 * m.strike));
        summary.push(Assertion::at_most("premium_monotone", eep.monotone_violation, 1e-7 * m.strike));

        for f in [0.8, 1.0, 1.2] {
            let s = f * m.strike;
            let fourier = price_put_fourier(&cfg.model, s, m.maturity)?.value;
            if cfg.model.nu.is_zero() {
                let sigma = cfg.model.sigma;
                let closed = black_scholes_put(s, m.strike, m.r, m.delta, sigma, m.maturity);
                summary.push(Assertion::within(format!("european_fourier_closed_form_{f}K"), fourier, closed, 1e-8));
                let tree = binomial_put(s, m.strike, m.r, m.delta, sigma, m.maturity, 2000);
                let pde = surface.american_price(s).ok_or_else(|| Error::Data(format!("spot {s} outside the grid")))?;
                summary.push(Assertion::relative(format!("american_vs_binomial_{f}K"), pde, tree, 0.005));
            } else {
                let pde = surface.european_price(s).ok_or_else(|| Error::Data(format!("spot {s} outside the grid")))?;
                summary.push(Assertion::relative(format!("european_pde_vs_fourier_{f}K"), pde, fourier, 0.01));
            }
        }

        if cfg.model.classify() != ModelClass::TypeA {
            let opts = EepOptions { seed: ctx.seed, ..EepOptions::default() };
            for (i, (tf, sf)) in EEP_POINTS.iter().enumerate() {
                let theta = tf * m.maturity;
                let spot = sf * m.strike;
                let slice = surface.slice_near(theta);
                let x = spot.ln();
                let (Some(p), Some(pe)) = (slice.american_at(x), slice.european_at(x)) else {
                    continue;
                };
                let est = eep_premium(&cfg.model, &surface, slice.theta, spot, &opts)?;
                let tol = (0.01 * m.strike).max(3.0 * est.stderr);
                summary.push(Assertion::within(format!("eep_identity_{i}"), est.value, p - pe, tol));
            }
        }
        Ok(())
    }
}
