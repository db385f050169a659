//! Exponential Lévy market models.
//!
//! The log-price is `ln S_t = ln S_0 + (r - δ)t + X_t` where `X` has triplet
//! `(σ², γ, ν)`. `γ` is never user-set: it is solved from the martingale
//! condition `σ²/2 + γ + ∫(e^y - 1 - y 1_{|y|≤1}) ν(dy) = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::JumpMeasure;
use crate::quadrature::brent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketParams {
    pub r: f64,
    pub delta: f64,
    pub strike: f64,
    pub maturity: f64,
    pub spot: f64,
}

impl MarketParams {
    pub fn new(r: f64, delta: f64, strike: f64, maturity: f64, spot: f64) -> Result<Self> {
        let m = MarketParams { r, delta, strike, maturity, spot };
        m.validate()?;
        Ok(m)
    }

    /// `r = 0` is accepted so the no-early-exercise case can be exercised;
    /// operations that need `r > 0` check it themselves.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("r", self.r, self.r >= 0.0),
            ("delta", self.delta, self.delta >= 0.0),
            ("strike", self.strike, self.strike > 0.0),
            ("maturity", self.maturity, self.maturity > 0.0),
            ("spot", self.spot, self.spot > 0.0),
        ];
        for (name, v, ok) in checks {
            if !ok || !v.is_finite() {
                return Err(Error::Config(format!("market.{name} out of range: {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelClass {
    /// Finite activity, no Brownian part.
    TypeA,
    /// Infinite activity, finite variation, no Brownian part.
    TypeB,
    /// Infinite variation (Brownian part or jumps).
    TypeC,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpMoments {
    /// `∫(e^y - 1)₊ ν(dy)`
    pub pos: f64,
    /// `∫(e^y - 1)₋ ν(dy)`; `+∞` for measures with infinite variation on the left.
    pub neg: f64,
}

#[derive(Debug, Clone)]
pub struct LevyModel {
    pub sigma: f64,
    pub gamma: f64,
    pub nu: JumpMeasure,
    pub market: MarketParams,
    /// Relative disagreement between the closed-form and quadrature
    /// evaluations of the martingale compensator.
    pub martingale_residual: f64,
}

pub fn make_model(sigma: f64, nu: JumpMeasure, market: MarketParams) -> Result<LevyModel> {
    market.validate()?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Config(format!("sigma must be finite and nonnegative, got {sigma}")));
    }
    let tail = nu.exp_tail_moment()?;
    if !tail.is_finite() {
        return Err(Error::Domain("∫_{|y|≥1} e^y ν(dy) is infinite".into()));
    }
    if sigma == 0.0 && !nu.has_negative_jumps() && !nu.positive_infinite_variation() {
        return Err(Error::Domain(
            "degenerate model: needs sigma > 0, negative jumps, or infinite variation upward".into(),
        ));
    }
    let closed = nu.exponent(Complex64::new(0.0, -1.0))?.re;
    let quad = nu.martingale_compensator()?;
    let residual = (closed - quad).abs() / closed.abs().max(1.0);
    if !(residual < 1e-10) {
        return Err(Error::Numerical(format!(
            "martingale compensator routes disagree: closed form {closed:.16e}, quadrature {quad:.16e}"
        )));
    }
    Ok(LevyModel {
        sigma,
        gamma: -0.5 * sigma * sigma - closed,
        nu,
        market,
        martingale_residual: residual,
    })
}

impl LevyModel {
    /// Same process and market with another maturity.
    pub fn with_maturity(&self, maturity: f64) -> Result<LevyModel> {
        let market = MarketParams::new(self.market.r, self.market.delta, self.market.strike, maturity, self.market.spot)?;
        Ok(LevyModel { market, ..self.clone() })
    }

    pub fn classify(&self) -> ModelClass {
        if self.sigma > 0.0 {
            ModelClass::TypeC
        } else if self.nu.total_mass().is_some() {
            ModelClass::TypeA
        } else if self.nu.finite_variation() {
            ModelClass::TypeB
        } else {
            ModelClass::TypeC
        }
    }

    pub fn finite_variation(&self) -> bool {
        self.sigma == 0.0 && self.nu.finite_variation()
    }

    /// `φ(u)` with `E e^{iuX_t} = e^{tφ(u)}`. Complex `u` must satisfy
    /// `-Im u` inside the exponential-moment strip of `ν`.
    pub fn characteristic_exponent(&self, u: Complex64) -> Result<Complex64> {
        self.check_strip(u)?;
        Ok(self.local_exponent(u) + self.nu.exponent(u)?)
    }

    /// Same as [`LevyModel::characteristic_exponent`] with the jump part by
    /// direct quadrature.
    pub fn characteristic_exponent_by_quadrature(&self, u: Complex64) -> Result<Complex64> {
        self.check_strip(u)?;
        Ok(self.local_exponent(u) + self.nu.exponent_by_quadrature(u)?)
    }

    fn local_exponent(&self, u: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        i * self.gamma * u - 0.5 * self.sigma * self.sigma * u * u
    }

    fn check_strip(&self, u: Complex64) -> Result<()> {
        let p = -u.im;
        let (lo, hi) = self.nu.moment_strip();
        if p <= lo || p >= hi {
            return Err(Error::Domain(format!(
                "Im u = {} outside the analyticity strip ({}, {})",
                u.im, -hi, -lo
            )));
        }
        Ok(())
    }

    pub fn exp_moment_integrals(&self) -> Result<ExpMoments> {
        let pos = self.nu.integrate(&|y: f64| y.exp_m1(), 0.0, f64::INFINITY, 1)?;
        let neg = self.nu.integrate(&|y: f64| -y.exp_m1(), f64::NEG_INFINITY, 0.0, 1)?;
        Ok(ExpMoments { pos, neg })
    }

    /// `γ₀ = γ - ∫_{|y|≤1} y ν(dy)`, the drift of the finite-variation form.
    pub fn gamma0(&self) -> Result<Option<f64>> {
        if !self.nu.finite_variation() {
            return Ok(None);
        }
        Ok(Some(self.gamma - self.nu.small_jump_mean()?))
    }

    pub fn d_plus(&self) -> Result<f64> {
        Ok(self.market.r - self.market.delta - self.exp_moment_integrals()?.pos)
    }

    /// `φ₀(x) = δx + ∫(x e^y - K)₊ ν(dy)`.
    pub fn phi0(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let k = self.market.strike;
        let from = (k / x).ln();
        let jumps = self.nu.integrate(&|y: f64| (x * y.exp() - k).max(0.0), from, f64::INFINITY, 0)?;
        Ok(self.market.delta * x + jumps)
    }

    /// `lim_{θ→0} b(θ)`: `K` when `d₊ ≥ 0`, otherwise the root of `φ₀(ξ) = rK` in `(0, K)`.
    pub fn limit_critical_price(&self) -> Result<f64> {
        let k = self.market.strike;
        if self.d_plus()? >= 0.0 {
            return Ok(k);
        }
        let rk = self.market.r * k;
        if !(rk > 0.0) {
            return Err(Error::Domain("limit below strike needs r > 0".into()));
        }
        // φ₀ is continuous, so evaluation errors inside the root finder are
        // surfaced through NaN and the bracket check.
        let f = |x: f64| self.phi0(x).map(|v| v - rk).unwrap_or(f64::NAN);
        brent(f, 0.0, k, 1e-10 * k, 200)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, Atoms, DoubleExponential, ExponentialTail, GammaLike, TemperedStableNegative};

    fn market(r: f64, delta: f64) -> MarketParams {
        MarketParams::new(r, delta, 100.0, 1.0, 100.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn neg_atom() -> JumpMeasure {
        JumpMeasure::none().with(Atoms::single(-0.2, 5.0).unwrap())
    }

    fn ts(alpha: f64) -> JumpMeasure {
        JumpMeasure::none().with(TemperedStableNegative::constant(alpha, 1.0, -1.0).unwrap())
    }

    #[test]
    fn gaussian_drift_and_exponent() {
        let m = make_model(0.2, JumpMeasure::none(), market(0.0, 0.0)).unwrap();
        assert!((m.gamma + 0.02).abs() < 1e-15);
        for u in [0.3, -1.7, 4.0] {
            let phi = m.characteristic_exponent(c(u, 0.0)).unwrap();
            let expect = c(-0.02 * u * u, -0.02 * u);
            assert!((phi - expect).norm() < 1e-14);
        }
        assert_eq!(m.characteristic_exponent(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn single_atom_drift() {
        let m = make_model(0.0, neg_atom(), market(0.06, 0.0)).unwrap();
        let y: f64 = -0.2;
        let expect = -5.0 * (y.exp() - 1.0 - y);
        assert!((m.gamma - expect).abs() < 1e-14, "{} vs {expect}", m.gamma);
        assert!(m.martingale_residual < 1e-10);
    }

    #[test]
    fn tempered_stable_martingale_residual() {
        let m = make_model(0.0, ts(1.5), market(0.06, 0.0)).unwrap();
        assert!(m.martingale_residual < 1e-10, "{}", m.martingale_residual);
        let phi = m.characteristic_exponent(c(0.0, -1.0)).unwrap();
        assert!(phi.norm() < 1e-10, "{phi}");
    }

    #[test]
    fn exponent_routes_agree() {
        let models = [
            make_model(0.0, JumpMeasure::none().with(Atoms::new(vec![
                Atom { location: -0.2, intensity: 5.0 },
                Atom { location: 1.4, intensity: 0.3 },
            ]).unwrap()), market(0.06, 0.0)).unwrap(),
            make_model(0.0, ts(1.5), market(0.06, 0.0)).unwrap(),
            make_model(0.0, ts(0.5), market(0.06, 0.0)).unwrap(),
            make_model(0.1, JumpMeasure::none().with(DoubleExponential::new(3.0, 0.3, 25.0, 10.0).unwrap()), market(0.05, 0.0)).unwrap(),
            make_model(0.0, JumpMeasure::none().with(GammaLike::new(2.0, 8.0, 12.0).unwrap()), market(0.05, 0.0)).unwrap(),
        ];
        for m in &models {
            for u in [c(0.5, 0.0), c(-3.0, 0.0), c(7.0, 0.0), c(2.0, -0.5), c(-1.0, 0.5)] {
                let a = m.characteristic_exponent(u).unwrap();
                let b = m.characteristic_exponent_by_quadrature(u).unwrap();
                assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "{:?} u={u}: {a} vs {b}", m.nu.families());
            }
        }
    }

    #[test]
    fn strip_violation_is_domain_error() {
        let nu = JumpMeasure::none().with(ExponentialTail::new(1.0, 3.0).unwrap());
        let m = make_model(0.2, nu, market(0.05, 0.0)).unwrap();
        assert!(m.characteristic_exponent(c(0.0, -2.0)).is_ok());
        assert!(matches!(m.characteristic_exponent(c(0.0, -3.5)), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_degenerate_models() {
        let up = JumpMeasure::none().with(Atoms::single(0.1, 1.0).unwrap());
        assert!(matches!(make_model(0.0, up, market(0.05, 0.0)), Err(Error::Domain(_))));
        assert!(make_model(0.0, JumpMeasure::none(), market(0.05, 0.0)).is_err());
        assert!(make_model(-0.1, JumpMeasure::none(), market(0.05, 0.0)).is_err());
    }

    #[test]
    fn classification() {
        let a = make_model(0.0, neg_atom(), market(0.06, 0.0)).unwrap();
        let b = make_model(0.0, ts(0.5), market(0.06, 0.0)).unwrap();
        let cc = make_model(0.0, ts(1.5), market(0.06, 0.0)).unwrap();
        let d = make_model(0.3, neg_atom(), market(0.06, 0.0)).unwrap();
        assert_eq!(a.classify(), ModelClass::TypeA);
        assert_eq!(b.classify(), ModelClass::TypeB);
        assert_eq!(cc.classify(), ModelClass::TypeC);
        assert_eq!(d.classify(), ModelClass::TypeC);
    }

    #[test]
    fn exp_moments_single_atom() {
        let m = make_model(0.0, neg_atom(), market(0.06, 0.0)).unwrap();
        let e = m.exp_moment_integrals().unwrap();
        assert_eq!(e.pos, 0.0);
        let expect = 5.0 * (1.0 - (-0.2f64).exp());
        assert!((e.neg - expect).abs() < 1e-14);
        assert!((e.neg - 0.9063).abs() < 1e-4);
        let none = make_model(0.2, JumpMeasure::none(), market(0.06, 0.0)).unwrap();
        assert_eq!(none.exp_moment_integrals().unwrap(), ExpMoments { pos: 0.0, neg: 0.0 });
    }

    #[test]
    fn exp_moments_tempered_stable() {
        let fv = make_model(0.0, ts(0.5), market(0.06, 0.0)).unwrap();
        let e = fv.exp_moment_integrals().unwrap();
        assert_eq!(e.pos, 0.0);
        // ∫_{-1}^0 (1 - e^y)|y|^{-1.5} dy by series: Σ_{n≥1} (-1)^{n+1}/(n! (n - 0.5))
        let mut series = 0.0;
        let mut fact = 1.0;
        for n in 1..30 {
            fact *= n as f64;
            series += if n % 2 == 1 { 1.0 } else { -1.0 } / (fact * (n as f64 - 0.5));
        }
        assert!((e.neg - series).abs() < 1e-10, "{} vs {series}", e.neg);
        let iv = make_model(0.0, ts(1.5), market(0.06, 0.0)).unwrap();
        assert_eq!(iv.exp_moment_integrals().unwrap().neg, f64::INFINITY);
    }

    #[test]
    fn d_plus_examples() {
        let bs = make_model(0.2, JumpMeasure::none(), market(0.05, 0.02)).unwrap();
        assert!((bs.d_plus().unwrap() - 0.03).abs() < 1e-15);
        let down = make_model(0.0, neg_atom(), market(0.06, 0.0)).unwrap();
        assert!((down.d_plus().unwrap() - 0.06).abs() < 1e-15);
        let up = JumpMeasure::none().with(Atoms::single(1.08f64.ln(), 1.0).unwrap());
        let m = make_model(0.2, up, market(0.05, 0.0)).unwrap();
        assert!((m.d_plus().unwrap() + 0.03).abs() < 1e-14);
    }

    #[test]
    fn phi0_and_limit_without_jumps() {
        let m = make_model(0.3, JumpMeasure::none(), market(0.04, 0.08)).unwrap();
        assert!((m.phi0(37.0).unwrap() - 0.08 * 37.0).abs() < 1e-13);
        assert_eq!(m.phi0(0.0).unwrap(), 0.0);
        assert!((m.limit_critical_price().unwrap() - 50.0).abs() < 1e-8);
    }

    #[test]
    fn limit_with_positive_atom() {
        let (y0, lam, r, delta) = (0.3f64, 0.6, 0.05, 0.01);
        let nu = JumpMeasure::none().with(Atoms::single(y0, lam).unwrap());
        let m = make_model(0.2, nu, market(r, delta)).unwrap();
        assert!(m.d_plus().unwrap() < 0.0);
        let x = 95.0;
        let direct = delta * x + lam * (x * y0.exp() - 100.0f64).max(0.0);
        assert!((m.phi0(x).unwrap() - direct).abs() < 1e-12);
        // piecewise-linear φ₀: root on the branch x > K e^{-y0}
        let xi = (r * 100.0 + lam * 100.0) / (delta + lam * y0.exp());
        assert!(xi > 100.0 * (-y0).exp() && xi < 100.0);
        let got = m.limit_critical_price().unwrap();
        assert!((got - xi).abs() < 1e-8 * 100.0, "{got} vs {xi}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn phi0_nondecreasing(y0 in 0.01f64..1.0, lam in 0.1f64..3.0, delta in 0.0f64..0.1,
                                  x1 in 1.0f64..99.0, dx in 0.0f64..50.0) {
                let nu = JumpMeasure::none().with(Atoms::single(y0, lam).unwrap())
                    .with(DoubleExponential::new(1.0, 0.5, 6.0, 4.0).unwrap());
                let m = make_model(0.0, nu, market(0.05, delta)).unwrap();
                let x2 = (x1 + dx).min(99.99);
                prop_assert!(m.phi0(x1).unwrap() <= m.phi0(x2).unwrap() + 1e-12);
            }

            #[test]
            fn exp_moment_identity(lam in 0.1f64..5.0, p in 0.0f64..0.9, up in 2.0f64..30.0,
                                   down in 0.5f64..30.0, cg in 0.1f64..3.0, g in 1.0f64..20.0,
                                   mm in 2.0f64..20.0) {
                let nu = JumpMeasure::none()
                    .with(DoubleExponential::new(lam, p, up, down).unwrap())
                    .with(GammaLike::new(cg, g, mm).unwrap());
                let m = make_model(0.0, nu, market(0.05, 0.0)).unwrap();
                let e = m.exp_moment_integrals().unwrap();
                let g0 = m.gamma0().unwrap().unwrap();
                prop_assert!((e.pos - e.neg + g0).abs() < 1e-8, "{} {} {}", e.pos, e.neg, g0);
            }

            #[test]
            fn class_flips_at_alpha_one(alpha in 0.05f64..1.95) {
                prop_assume!((alpha - 1.0).abs() > 1e-9);
                let m = make_model(0.0, ts(alpha), market(0.05, 0.0)).unwrap();
                let expect = if alpha < 1.0 { ModelClass::TypeB } else { ModelClass::TypeC };
                prop_assert_eq!(m.classify(), expect);
            }

            #[test]
            fn limit_below_strike_iff_d_plus_negative(lam in 0.0f64..0.5, r in 0.01f64..0.1) {
                let mut nu = JumpMeasure::none().with(Atoms::single(-0.1, 1.0).unwrap());
                if lam > 0.0 {
                    nu = nu.with(ExponentialTail::new(lam, 4.0).unwrap());
                }
                let m = make_model(0.0, nu, market(r, 0.0)).unwrap();
                let xi = m.limit_critical_price().unwrap();
                prop_assert_eq!(xi < 100.0, m.d_plus().unwrap() < 0.0);
            }
        }
    }
}
