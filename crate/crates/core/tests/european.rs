mod common;

use common::*;
use levy_put::european::{
    european_boundary, mc_put, mixture_put, price_put_fourier, price_put_mc, pricer, PricerOptions, PRICERS,
};
use levy_put::measure::JumpMeasure;
use levy_put::model::LevyModel;
use levy_put::simulation::EpsPolicy;
use levy_put::special::black_scholes_put;

#[test]
fn contour_matches_black_scholes() {
    let m = black_scholes(0.3, 0.05, 0.0, 0.5);
    for theta in [1e-4, 0.01, 0.5, 2.0] {
        for spot in [80.0, 100.0, 120.0] {
            let got = price_put_fourier(&m, spot, theta).unwrap().value;
            let want = black_scholes_put(spot, 100.0, 0.05, 0.0, 0.3, theta);
            assert!((got - want).abs() < 1e-8, "θ={theta} S={spot}: {got} vs {want}");
        }
    }
}

#[test]
fn contour_with_dividends() {
    let m = black_scholes(0.2, 0.03, 0.07, 1.0);
    let got = price_put_fourier(&m, 95.0, 0.7).unwrap().value;
    let want = black_scholes_put(95.0, 100.0, 0.03, 0.07, 0.2, 0.7);
    assert!((got - want).abs() < 1e-8);
}

#[test]
fn payoff_and_zero_spot_limits() {
    let m = black_scholes(0.3, 0.05, 0.0, 1.0);
    assert_eq!(price_put_fourier(&m, 80.0, 0.0).unwrap().value, 20.0);
    let tiny = price_put_fourier(&m, 80.0, 1e-7).unwrap().value;
    assert!((tiny - 20.0).abs() < 1e-5, "{tiny}");
    let zero = price_put_fourier(&m, 0.0, 0.5).unwrap().value;
    assert!((zero - 100.0 * (-0.025f64).exp()).abs() < 1e-12);
    let near_zero = price_put_fourier(&m, 1e-3, 0.5).unwrap().value;
    assert!((near_zero - (100.0 * (-0.025f64).exp() - 1e-3)).abs() < 1e-8);
}

#[test]
fn mixture_and_contour_agree_with_diffusion() {
    let m = single_atom(0.2, -0.2, 5.0, 0.06, 1.0);
    for theta in [0.01, 0.3, 1.0] {
        for spot in [85.0, 100.0, 110.0] {
            let a = mixture_put(&m, spot, theta).unwrap();
            let b = pricer("contour", &PricerOptions::default()).unwrap().price(&m, spot, theta).unwrap().value;
            assert!((a - b).abs() < 1e-8, "θ={theta} S={spot}: {a} vs {b}");
        }
    }
}

#[test]
fn pure_jump_atom_against_hand_sum() {
    // X_θ = b0 θ - 0.2 N, N ~ Poisson(5θ), b0 = 5(1 - e^{-0.2}).
    let m = single_atom(0.0, -0.2, 5.0, 0.06, 1.0);
    let theta = 0.4;
    let spot = 97.0;
    let b0 = 5.0 * (1.0 - (-0.2f64).exp());
    let mut want = 0.0;
    let mut p = (-5.0 * theta as f64).exp();
    for n in 0..80 {
        if n > 0 {
            p *= 5.0 * theta / n as f64;
        }
        let s = spot * ((0.06 + b0) * theta - 0.2 * n as f64).exp();
        want += p * (100.0 - s).max(0.0);
    }
    want *= (-0.06 * theta as f64).exp();
    let got = price_put_fourier(&m, spot, theta).unwrap().value;
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
}

fn assert_mc_agrees(m: &LevyModel, spot: f64, theta: f64, n: usize, eps: f64) {
    let f = price_put_fourier(m, spot, theta).unwrap().value;
    let (v, se) = mc_put(m, spot, theta, n, 7, EpsPolicy::Fixed(eps)).unwrap();
    assert!((v - f).abs() <= 3.0 * se + 1e-12, "θ={theta}: fourier {f}, mc {v} ± {se}");
}

#[test]
fn monte_carlo_agrees_across_families() {
    for theta in [0.01, 0.1, 1.0] {
        assert_mc_agrees(&black_scholes(0.3, 0.05, 0.0, 1.0), 100.0, theta, 200_000, 0.0);
        assert_mc_agrees(&single_atom(0.0, -0.2, 5.0, 0.06, 1.0), 100.0, theta, 200_000, 0.0);
        assert_mc_agrees(&kou(0.0, 0.05), 100.0, theta, 200_000, 0.0);
        assert_mc_agrees(&tempered_stable(1.5, 0.06, 1.0), 100.0, theta, 200_000, 0.05);
        assert_mc_agrees(&tempered_stable(0.5, 0.06, 1.0), 100.0, theta, 200_000, 0.01);
    }
}

#[test]
fn deterministic_path_is_exact() {
    let m = LevyModel {
        sigma: 0.0,
        gamma: 0.0,
        nu: JumpMeasure::none(),
        market: market(0.04, 0.04, 1.0),
        martingale_residual: 0.0,
    };
    let q = price_put_mc(&m, 90.0, 0.5, 10_000, 3).unwrap();
    let want = 10.0 * (-0.02f64).exp();
    assert!((q.value - want).abs() < 1e-12);
    assert!(q.stderr.unwrap() < 1e-12);
}

#[test]
fn quotes_respect_bounds() {
    let models = [black_scholes(0.3, 0.05, 0.02, 1.0), kou(0.1, 0.05), tempered_stable(1.5, 0.06, 1.0)];
    for m in &models {
        for theta in [0.01, 0.5] {
            for spot in [50.0, 95.0, 100.0, 140.0] {
                let v = price_put_fourier(m, spot, theta).unwrap().value;
                let upper = 100.0 * (-m.market.r * theta).exp();
                let lower = (upper - spot * (-m.market.delta * theta).exp()).max(0.0);
                assert!(v >= lower - 1e-9 && v <= upper + 1e-9, "{v} ∉ [{lower}, {upper}]");
            }
        }
    }
}

#[test]
fn convex_nonincreasing_in_spot() {
    let models = [black_scholes(0.3, 0.05, 0.0, 1.0), kou(0.0, 0.05), tempered_stable(1.5, 0.06, 1.0)];
    for m in &models {
        let xs: Vec<f64> = (0..50).map(|j| 60.0 + j as f64).collect();
        let v: Vec<f64> = xs.iter().map(|&x| price_put_fourier(m, x, 0.1).unwrap().value).collect();
        for j in 1..49 {
            assert!(v[j + 1] <= v[j] + 1e-9 * 100.0);
            assert!(v[j + 1] - 2.0 * v[j] + v[j - 1] >= -1e-9 * 100.0, "{:?} at {}", m.nu.families(), xs[j]);
        }
    }
}

#[test]
fn boundary_matches_bisection_on_closed_form() {
    let m = black_scholes(0.3, 0.05, 0.0, 1.0);
    let theta = 0.25;
    let (mut lo, mut hi) = (1.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if black_scholes_put(mid, 100.0, 0.05, 0.0, 0.3, theta) - (100.0 - mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let got = european_boundary(&m, theta).unwrap();
    assert!((got - lo).abs() < 1e-8 * 100.0, "{got} vs {lo}");
}

#[test]
fn boundary_root_residual() {
    for m in [kou(0.1, 0.05), tempered_stable(1.5, 0.06, 1.0), single_atom(0.0, -0.2, 5.0, 0.06, 1.0)] {
        for theta in [1e-3, 0.1] {
            let b = european_boundary(&m, theta).unwrap();
            assert!(b > 0.0 && b < 100.0);
            let p = price_put_fourier(&m, b, theta).unwrap().value;
            assert!((p - (100.0 - b)).abs() <= 1e-9 * 100.0, "{:?}: residual {}", m.nu.families(), p - (100.0 - b));
        }
    }
}

#[test]
fn finite_variation_boundary_rate() {
    let m = single_atom(0.0, -0.2, 5.0, 0.06, 1.0);
    let target = 5.0 * (1.0 - (-0.2f64).exp());
    let mut prev = f64::INFINITY;
    for theta in [1e-2, 1e-3, 1e-4] {
        let b = european_boundary(&m, theta).unwrap();
        let zeta = (100.0 / b - 1.0) / theta;
        let err = (zeta / target - 1.0).abs();
        assert!(err < prev, "θ={theta}: ratio {zeta} vs {target}");
        prev = err;
    }
    assert!(prev < 0.02, "{prev}");
}

#[test]
fn registry_lists_strategies() {
    let names: Vec<_> = PRICERS.iter().map(|p| p.name).collect();
    assert_eq!(names, ["fourier", "contour", "mixture", "monte_carlo"]);
    assert!(pricer("binomial", &PricerOptions::default()).is_err());
}

#[test]
fn monte_carlo_is_reproducible() {
    let m = kou(0.1, 0.05);
    let a = price_put_mc(&m, 100.0, 0.3, 20_000, 11).unwrap();
    let b = price_put_mc(&m, 100.0, 0.3, 20_000, 11).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}
