//! Acceptance suite. Each criterion prints one PASS/FAIL line to stderr,
//! bypassing output capture, then asserts.

mod common;

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use common::*;
use levy_put::american::{
    binomial_put, eep_bound_check, eep_premium, price_american, EepOptions, GridSpec, PriceSurface, SolverOptions,
};
use levy_put::asymptotics::{
    detect_regime, fit_boundary_rate, fit_european_rate, prediction, Regime,
};
use levy_put::measure::{Atoms, DoubleExponential, JumpMeasure};
use levy_put::model::{make_model, LevyModel};
use levy_put::simulation::{compensation_check, positive_part_growth, stable_limit_check, EpsPolicy};
use levy_put::special::black_scholes_put;
use levy_put::verification::surface_invariants;
use statrs::function::gamma::gamma;

fn report(n: u32, name: &str, ok: bool, detail: String) {
    let line = format!("{} criterion {n} ({name}): {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "{line}");
}

const K: f64 = 100.0;

fn solve(model: &LevyModel, spec: GridSpec) -> PriceSurface {
    price_american(model, &spec, &SolverOptions::default()).unwrap()
}

// Shared surfaces; the boundary at θ does not depend on T, so the rate
// checks solve on short horizons.

fn black_scholes_case() -> &'static (LevyModel, PriceSurface, f64) {
    static S: OnceLock<(LevyModel, PriceSurface, f64)> = OnceLock::new();
    S.get_or_init(|| {
        let start = Instant::now();
        let model = black_scholes(0.3, 0.05, 0.0, 0.5);
        let surface = solve(&model, GridSpec::new(2000, 400, 1e-4, 0.0));
        (model, surface, start.elapsed().as_secs_f64())
    })
}

fn finite_variation_model(maturity: f64) -> LevyModel {
    single_atom(0.0, -0.2, 5.0, 0.06, maturity)
}

fn finite_variation_case() -> &'static (LevyModel, PriceSurface) {
    static S: OnceLock<(LevyModel, PriceSurface)> = OnceLock::new();
    S.get_or_init(|| {
        let model = finite_variation_model(2e-2);
        let surface = solve(&model, GridSpec::new(4000, 400, 1e-5, 0.0));
        (model, surface)
    })
}

fn tempered_stable_case() -> &'static (LevyModel, PriceSurface) {
    static S: OnceLock<(LevyModel, PriceSurface)> = OnceLock::new();
    S.get_or_init(|| {
        let model = tempered_stable(1.5, 0.05, 2e-2);
        let surface = solve(&model, GridSpec::new(4000, 400, 1e-5, 1e-4));
        (model, surface)
    })
}

fn sub_strike_model() -> LevyModel {
    let nu = JumpMeasure::none().with(DoubleExponential::new(3.0, 0.3, 12.0, 6.0).unwrap());
    make_model(0.2, nu, market(0.05, 0.0, 2e-2)).unwrap()
}

fn sub_strike_case() -> &'static (LevyModel, PriceSurface) {
    static S: OnceLock<(LevyModel, PriceSurface)> = OnceLock::new();
    S.get_or_init(|| {
        let model = sub_strike_model();
        let surface = solve(&model, GridSpec::new(4000, 400, 1e-4, 0.0));
        (model, surface)
    })
}

fn diffusion_jump_case() -> &'static (LevyModel, PriceSurface) {
    static S: OnceLock<(LevyModel, PriceSurface)> = OnceLock::new();
    S.get_or_init(|| {
        let nu = JumpMeasure::none().with(Atoms::single(-0.1, 1.0).unwrap());
        let model = make_model(0.3, nu, market(0.1, 0.0, 2e-2)).unwrap();
        let surface = solve(&model, GridSpec::new(8000, 400, 1e-5, 0.0));
        (model, surface)
    })
}

fn premium_case() -> &'static (LevyModel, PriceSurface) {
    static S: OnceLock<(LevyModel, PriceSurface)> = OnceLock::new();
    S.get_or_init(|| {
        let model = tempered_stable(1.5, 0.05, 0.5);
        let opts = SolverOptions { store_every: Some(5), ..SolverOptions::default() };
        let surface = price_american(&model, &GridSpec::new(1000, 300, 1e-3, 1e-3), &opts).unwrap();
        (model, surface)
    })
}

#[test]
fn criterion_1_black_scholes_reduction() {
    let (model, surface, seconds) = black_scholes_case();
    let mut worst_tree = 0.0f64;
    let mut worst_closed = 0.0f64;
    for spot in [80.0, 100.0, 120.0] {
        let tree = binomial_put(spot, K, 0.05, 0.0, 0.3, 0.5, 2000);
        let pde = surface.american_price(spot).unwrap();
        worst_tree = worst_tree.max((pde / tree - 1.0).abs());
        let fourier = levy_put::european::price_put_fourier(model, spot, 0.5).unwrap().value;
        let closed = black_scholes_put(spot, K, 0.05, 0.0, 0.3, 0.5);
        worst_closed = worst_closed.max((fourier - closed).abs());
    }
    let ok = worst_tree <= 5e-3 && worst_closed <= 1e-8 && *seconds < 60.0;
    report(
        1,
        "Black-Scholes reduction",
        ok,
        format!("max rel vs binomial {worst_tree:.2e} (≤ 5e-3), Fourier vs closed form {worst_closed:.2e} (≤ 1e-8), solve {seconds:.1} s (< 60)"),
    );
}

#[test]
fn criterion_2_finite_variation_linear_rate() {
    let (model, surface) = finite_variation_case();
    let target = 5.0 * (1.0 - (-0.2f64).exp());
    let t = 1.0;
    let window = (1e-3 * t, 5e-3 * t);
    let curve = &surface.boundary;
    let dev = |pts: Vec<(f64, f64)>| pts.iter().map(|(th, b)| ((K / b - 1.0) / th / target - 1.0).abs()).fold(0.0, f64::max);
    let (da, de) = (dev(curve.window(window.0, window.1)), dev(curve.window_e(window.0, window.1)));
    let regime = detect_regime(model).unwrap();
    let law = prediction(&regime, &model.market).unwrap();
    let fa = fit_boundary_rate(curve, &law, window).unwrap();
    let fe = fit_european_rate(curve, &law, window).unwrap();
    let ok = da <= 0.15 && de <= 0.15 && (fa.fitted_exponent - 1.0).abs() <= 0.05 && (fe.fitted_exponent - 1.0).abs() <= 0.05;
    report(
        2,
        "finite-variation linear rate",
        ok,
        format!(
            "max rel dev of slopes: american {da:.3}, european {de:.3} (≤ 0.15); exponents {:.4}, {:.4} (1 ± 0.05)",
            fa.fitted_exponent, fe.fitted_exponent
        ),
    );
}

#[test]
fn criterion_3_stable_exponent() {
    let (model, surface) = tempered_stable_case();
    let alpha: f64 = 1.5;
    let oracle = K * (gamma(2.0 - alpha) / (alpha - 1.0)).powf(1.0 / alpha);
    let regime = detect_regime(model).unwrap();
    let law = prediction(&regime, &model.market).unwrap();
    let fit = fit_boundary_rate(&surface.boundary, &law, (1e-4, 1e-2)).unwrap();
    let de = (fit.fitted_exponent - 1.0 / alpha).abs();
    let dc = (fit.fitted_constant / oracle - 1.0).abs();
    report(
        3,
        "tempered-stable exponent",
        de <= 0.1 && dc <= 0.3,
        format!(
            "exponent {:.4} vs {:.4} (± 0.1), constant {:.2} vs {oracle:.2} (rel {dc:.3} ≤ 0.3)",
            fit.fitted_exponent,
            1.0 / alpha,
            fit.fitted_constant
        ),
    );
}

#[test]
fn criterion_4_sub_strike_limit() {
    let (model, surface) = sub_strike_case();
    assert!(model.d_plus().unwrap() < 0.0);
    // φ₀(x) = λ p K (x/K)^η / (η - 1) for the double-exponential upper tail
    let (lambda, p, eta, r) = (3.0, 0.3, 12.0, 0.05);
    let phi0 = |x: f64| lambda * p * K * (x / K).powf(eta) / (eta - 1.0);
    let (mut lo, mut hi) = (0.0, K);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi0(mid) < r * K { lo = mid } else { hi = mid }
    }
    let xi = 0.5 * (lo + hi);
    let b = surface.boundary.b_at(1e-4).unwrap();
    let rel = (b / xi - 1.0).abs();
    report(4, "sub-strike limit", rel <= 0.02, format!("b(θ_min) = {b:.4}, ξ = {xi:.4}, rel {rel:.2e} (≤ 0.02)"));
}

#[test]
fn criterion_5_diffusion_regime() {
    let (model, surface) = diffusion_jump_case();
    let regime = detect_regime(model).unwrap();
    assert!(matches!(regime, Regime::DiffusionDominated { .. }));
    let ratio = |th: f64| {
        let b = surface.boundary.b_at(th).unwrap();
        (K - b) / (0.3 * K * (th * th.ln().abs()).sqrt())
    };
    let rs: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&th| ratio(th)).collect();
    let ok = (0.5..=1.2).contains(&rs[2]) && rs.windows(2).all(|w| w[1] >= w[0]);
    report(
        5,
        "diffusion regime",
        ok,
        format!("ratios at θ = 1e-2, 1e-3, 1e-4: {:.4}, {:.4}, {:.4} (last in [0.5, 1.2], nondecreasing)", rs[0], rs[1], rs[2]),
    );
}

#[test]
fn criterion_6_infinite_variation_divergence() {
    let g = |s: &PriceSurface, th: f64| (K / s.boundary.b_at(th).unwrap() - 1.0) / th;
    let (_, ts) = tempered_stable_case();
    let (_, fv) = finite_variation_case();
    let growth = g(ts, 1e-4) / g(ts, 1e-2);
    let flat = g(fv, 1e-4) / g(fv, 1e-2);
    let ok = growth >= 3.0 && (flat - 1.0).abs() <= 0.2;
    report(
        6,
        "infinite-variation divergence",
        ok,
        format!("stable growth {growth:.3} (≥ 3), finite-variation control {flat:.3} (within 20% of 1)"),
    );
}

#[test]
fn criterion_7_premium_identity() {
    let (model, surface) = premium_case();
    let opts = EepOptions { n_paths: 20_000, steps: 200, seed: 7, ..EepOptions::default() };
    let mut worst = 0.0f64;
    let mut count = 0;
    for theta in [0.1, 0.2, 0.3, 0.4, 0.5] {
        for spot in [85.0, 95.0, 100.0, 110.0] {
            let slice = surface.slice_near(theta);
            let x = f64::ln(spot);
            let gap = slice.american_at(x).unwrap() - slice.european_at(x).unwrap();
            let e = eep_premium(model, surface, slice.theta, spot, &opts).unwrap();
            let tol = f64::max(0.01 * K, 3.0 * e.stderr);
            worst = worst.max((gap - e.value).abs() / tol);
            count += 1;
        }
    }
    let bounds = eep_bound_check(surface);
    let ok = worst <= 1.0 && bounds.passed;
    report(
        7,
        "early-exercise premium",
        ok,
        format!(
            "{count} points, worst |gap - e| / tol {worst:.3} (≤ 1); bound violation {:.2e}, below European {:.2e}, monotone {:.2e} (≤ 1e-7 K)",
            bounds.bound_violation, bounds.below_european, bounds.monotone_violation
        ),
    );
}

#[test]
fn criterion_8_small_time_limits() {
    let atom = single_atom(0.0, -0.2, 5.0, 0.06, 1.0);
    let ts = tempered_stable(1.5, 0.05, 1.0);
    let kou = kou(0.2, 0.05);
    let n = 1_000_000;
    let mut z = Vec::new();
    z.push(compensation_check(&atom, &|_| 1.0, 0.4, n, 11, EpsPolicy::Fixed(0.0)).unwrap().row.zscore);
    z.push(compensation_check(&atom, &|y| y, 1.0, n, 12, EpsPolicy::Fixed(0.0)).unwrap().row.zscore);
    z.push(compensation_check(&ts, &|y| y * y, 0.1, n, 13, EpsPolicy::Fixed(0.01)).unwrap().row.zscore);
    z.push(compensation_check(&kou, &|y| y.abs(), 0.5, n, 14, EpsPolicy::Fixed(0.0)).unwrap().row.zscore);
    let worst_z = z.iter().map(|v| v.abs()).fold(0.0, f64::max);

    let u: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.25).collect();
    let stable = stable_limit_check(&ts, &[1e-4], 100_000, &u, 15, EpsPolicy::Scaled(0.01)).unwrap();
    let sup = stable.rows[0].estimate;

    let bs = black_scholes(0.2, 0.05, 0.0, 1.0);
    let growth = positive_part_growth(&bs, &[1e-5], 1_000_000, 16, EpsPolicy::Fixed(0.0)).unwrap();
    let ratio = growth.benchmark_ratio.unwrap();

    let ok = worst_z <= 3.0 && sup <= 0.05 && (ratio - 1.0).abs() <= 0.05;
    report(
        8,
        "small-time limits",
        ok,
        format!("max |z| {worst_z:.3} (≤ 3), stable ch.f. sup error {sup:.4} (≤ 0.05), Gaussian positive-part ratio {ratio:.4} (1 ± 0.05)"),
    );
}

#[test]
fn criterion_9_structural_invariants() {
    let surfaces: [(&str, &PriceSurface); 6] = [
        ("black_scholes", &black_scholes_case().1),
        ("finite_variation", &finite_variation_case().1),
        ("tempered_stable", &tempered_stable_case().1),
        ("sub_strike", &sub_strike_case().1),
        ("diffusion_jump", &diffusion_jump_case().1),
        ("premium", &premium_case().1),
    ];
    let mut failed = Vec::new();
    for (name, s) in surfaces {
        for a in surface_invariants(s) {
            if !a.passed {
                failed.push(format!("{name}: {}", a.line()));
            }
        }
    }
    let detail = if failed.is_empty() {
        format!("{} surfaces, all invariants hold (shape ≤ 1e-7 K, complementarity ≤ 1e-8 K)", surfaces.len())
    } else {
        failed.join("; ")
    };
    report(9, "structural invariants", failed.is_empty(), detail);
}
