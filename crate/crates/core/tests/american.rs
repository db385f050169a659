mod common;

use common::*;
use levy_put::american::{binomial_put, build_grid, eep_bound_check, lcp_solver, price_american, Psor, solve_with, GridSpec, SolverOptions};
use levy_put::european::price_put_fourier;

#[test]
fn black_scholes_matches_binomial() {
    let model = black_scholes(0.3, 0.05, 0.0, 0.5);
    let spec = GridSpec::new(2000, 400, 1e-3, 1e-3);
    let surface = price_american(&model, &spec, &SolverOptions::default()).unwrap();
    for spot in [80.0, 100.0, 120.0] {
        let pde = surface.american_price(spot).unwrap();
        let tree = binomial_put(spot, 100.0, 0.05, 0.0, 0.3, 0.5, 20_000);
        assert!((pde - tree).abs() < 5e-3 * tree, "S={spot}: {pde} vs {tree}");
    }
}

#[test]
fn european_companion_matches_closed_form() {
    let model = black_scholes(0.3, 0.05, 0.0, 0.5);
    let spec = GridSpec::new(2000, 400, 1e-3, 1e-3);
    let surface = price_american(&model, &spec, &SolverOptions::default()).unwrap();
    for spot in [80.0, 100.0, 120.0] {
        let pde = surface.european_price(spot).unwrap();
        let exact = price_put_fourier(&model, spot, 0.5).unwrap().value;
        assert!((pde - exact).abs() < 5e-3 * exact, "S={spot}: {pde} vs {exact}");
    }
}

#[test]
fn single_atom_lumps_to_its_intensity() {
    let model = single_atom(0.2, -0.3, 0.7, 0.05, 1.0);
    let grid = build_grid(&model, &GridSpec::new(1000, 200, 1e-3, 1e-3)).unwrap();
    let total: f64 = grid.jump_weights.iter().sum();
    assert!((total - 0.7).abs() < 1e-12);
    assert_eq!(grid.sigma_eps, 0.0);
}

#[test]
fn small_jump_variance_of_tempered_stable() {
    // one-sided α = 1.5 with unit scale: ∫_0^ε y^{1-α} dy = ε^{0.5} / 0.5
    let model = tempered_stable(1.5, 0.05, 1.0);
    let eps = 1e-3;
    let grid = build_grid(&model, &GridSpec::new(1000, 200, 1e-3, eps)).unwrap();
    let expected = (eps.powf(0.5) / 0.5).sqrt();
    assert!((grid.sigma_eps - expected).abs() < 2e-2 * expected, "{} vs {expected}", grid.sigma_eps);
}

#[test]
fn psor_agrees_with_direct_solver() {
    let model = black_scholes(0.3, 0.05, 0.0, 0.25);
    let grid = build_grid(&model, &GridSpec::new(400, 120, 1e-3, 1e-3)).unwrap();
    let opts = SolverOptions::default();
    let a = solve_with(&model, &grid, &opts, lcp_solver("brennan_schwartz").unwrap().as_ref()).unwrap();
    let b = solve_with(&model, &grid, &opts, &Psor { tol: 1e-13, ..Psor::default() }).unwrap();
    for spot in [85.0, 100.0, 115.0] {
        let (pa, pb) = (a.american_price(spot).unwrap(), b.american_price(spot).unwrap());
        assert!((pa - pb).abs() < 1e-6, "{pa} vs {pb}");
    }
}

#[test]
fn diagnostics_hold_for_jump_models() {
    for model in [kou(0.2, 0.05), tempered_stable(1.5, 0.05, 0.5)] {
        let spec = GridSpec::new(800, 200, 1e-3, 1e-3);
        let surface = price_american(&model, &spec, &SolverOptions::default()).unwrap();
        let d = &surface.diagnostics;
        let k = 100.0;
        assert!(d.below_payoff <= 1e-9 * k, "{d:?}");
        assert!(d.below_european <= 1e-7 * k, "{d:?}");
        assert!(d.convexity <= 1e-7 * k, "{d:?}");
        assert!(d.increasing_in_x <= 1e-7 * k, "{d:?}");
        assert!(eep_bound_check(&surface).passed, "{d:?}");
    }
}

#[test]
fn zero_rate_has_no_premium() {
    let model = black_scholes(0.3, 0.0, 0.0, 0.5);
    let spec = GridSpec::new(800, 200, 1e-3, 1e-3);
    let surface = price_american(&model, &spec, &SolverOptions::default()).unwrap();
    let p = surface.american_price(100.0).unwrap();
    let e = surface.european_price(100.0).unwrap();
    assert!((p - e).abs() < 1e-6, "{p} vs {e}");
}

#[test]
fn boundary_below_strike_and_increasing_in_time_to_maturity() {
    let model = black_scholes(0.3, 0.05, 0.0, 0.5);
    let spec = GridSpec::new(1500, 300, 1e-3, 1e-3);
    let surface = price_american(&model, &spec, &SolverOptions::default()).unwrap();
    let b = &surface.boundary;
    assert!(b.b[1..].iter().flatten().all(|v| *v <= 100.0));
    assert!(b.max_increase_cells() <= 1.0, "{}", b.max_increase_cells());
}

#[test]
fn theta_zero_slice_is_the_payoff() {
    let model = kou(0.2, 0.05);
    let spec = GridSpec::new(400, 100, 1e-3, 1e-3);
    let surface = price_american(&model, &spec, &SolverOptions::default()).unwrap();
    let first = &surface.slices[0];
    assert_eq!(first.theta, 0.0);
    assert_eq!(first.american, first.payoff);
}

#[test]
fn jump_companions_match_fourier() {
    for model in [kou(0.2, 0.05), single_atom(0.2, -0.2, 5.0, 0.05, 0.5), tempered_stable(1.5, 0.05, 0.5)] {
        let spec = GridSpec::new(1000, 400, 1e-3, 1e-3);
        let surface = price_american(&model, &spec, &SolverOptions::default()).unwrap();
        let t = surface.last().theta;
        for spot in [90.0, 100.0, 110.0] {
            let pde = surface.european_price(spot).unwrap();
            let exact = price_put_fourier(&model, spot, t).unwrap().value;
            assert!((pde - exact).abs() < 1e-2 * exact, "S={spot}: {pde} vs {exact}");
        }
    }
}

#[test]
fn discrete_martingale_identity() {
    for model in [kou(0.2, 0.05), tempered_stable(1.5, 0.05, 0.5), black_scholes(0.3, 0.05, 0.02, 1.0)] {
        let grid = build_grid(&model, &GridSpec::new(600, 150, 1e-3, 1e-3)).unwrap();
        assert!(grid.martingale_residual.abs() < 1e-8);
        assert!(grid.step_diffusion.iter().all(|d| *d >= 0.0));
        assert_eq!(grid.shifts.len(), grid.thetas.len());
    }
}

#[test]
fn refinement_moves_at_the_money_price_little() {
    let model = black_scholes(0.3, 0.05, 0.0, 0.5);
    let coarse = price_american(&model, &GridSpec::new(1000, 200, 1e-3, 1e-3), &SolverOptions::default()).unwrap();
    let fine = price_american(&model, &GridSpec::new(2000, 400, 1e-3, 1e-3), &SolverOptions::default()).unwrap();
    let (a, b) = (coarse.american_price(100.0).unwrap(), fine.american_price(100.0).unwrap());
    assert!((a - b).abs() <= 2e-3 * b, "{a} vs {b}");
}

#[test]
fn grid_rejects_bad_specs() {
    let model = black_scholes(0.3, 0.05, 0.0, 0.5);
    assert!(build_grid(&model, &GridSpec::new(100, 200, 1e-3, 1e-3)).is_err());
    assert!(build_grid(&model, &GridSpec::new(400, 50, 1e-3, 1e-3)).is_err());
    assert!(build_grid(&model, &GridSpec::new(400, 200, 0.0, 1e-3)).is_err());
    let ts = tempered_stable(1.5, 0.05, 0.5);
    assert!(build_grid(&ts, &GridSpec::new(400, 200, 1e-3, 0.9)).is_err());
}

#[test]
fn early_exercise_premium_matches_surface() {
    use levy_put::american::{eep_premium, EepOptions};
    let model = tempered_stable(1.5, 0.05, 0.5);
    let spec = GridSpec::new(1000, 300, 1e-3, 1e-3);
    let opts = SolverOptions { store_every: Some(10), ..Default::default() };
    let surface = price_american(&model, &spec, &opts).unwrap();
    let eep = EepOptions { n_paths: 20_000, steps: 200, ..Default::default() };
    for (theta, spot) in [(0.5, 100.0), (0.25, 90.0), (0.1, 110.0)] {
        let slice = surface.slice_near(theta);
        let gap = slice.american_at(f64::ln(spot)).unwrap() - slice.european_at(f64::ln(spot)).unwrap();
        let e = eep_premium(&model, &surface, slice.theta, spot, &eep).unwrap();
        assert!((gap - e.value).abs() <= f64::max(1.0, 3.0 * e.stderr), "θ={theta} S={spot}: {gap} vs {e:?}");
    }
}

#[test]
fn premium_refuses_finite_activity() {
    use levy_put::american::{eep_premium, EepOptions};
    let model = single_atom(0.0, -0.2, 5.0, 0.06, 0.5);
    let surface = price_american(&model, &GridSpec::new(400, 100, 1e-3, 1e-3), &SolverOptions::default()).unwrap();
    assert!(eep_premium(&model, &surface, 0.5, 100.0, &EepOptions::default()).is_err());
}
