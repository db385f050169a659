//! Assertion records for the machine-readable run summary.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::american::PriceSurface;

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Assertion {
    /// `|measured - target| ≤ tolerance`
    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let passed = (measured - target).abs() <= tolerance;
        Assertion { name: name.into(), measured, target, tolerance, passed, note: None }
    }

    /// `|measured - target| ≤ rel |target|`; the tolerance field holds `rel`.
    pub fn relative(name: impl Into<String>, measured: f64, target: f64, rel: f64) -> Self {
        let passed = (measured - target).abs() <= rel * target.abs();
        Assertion { name: name.into(), measured, target, tolerance: rel, passed, note: None }
    }

    /// `measured ≤ limit`
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Assertion { name: name.into(), measured, target: limit, tolerance: 0.0, passed: measured <= limit, note: None }
    }

    /// `measured ≥ limit`
    pub fn at_least(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Assertion { name: name.into(), measured, target: limit, tolerance: 0.0, passed: measured >= limit, note: None }
    }

    /// `lo ≤ measured ≤ hi`; target is the midpoint, tolerance the half-width.
    pub fn between(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        let passed = measured >= lo && measured <= hi;
        Assertion { name: name.into(), measured, target: 0.5 * (lo + hi), tolerance: 0.5 * (hi - lo), passed, note: None }
    }

    /// A boolean property, recorded as 1 for true.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let measured = if ok { 1.0 } else { 0.0 };
        Assertion { name: name.into(), measured, target: 1.0, tolerance: 0.0, passed: ok, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: measured {:e}, target {:e}, tolerance {:e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.target,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: String,
    pub experiment: String,
    pub seed: u64,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    /// Reported quantities that carry no pass/fail judgement.
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Summary {
    pub fn new(config: impl Into<String>, experiment: impl Into<String>, seed: u64) -> Self {
        Summary {
            config: config.into(),
            experiment: experiment.into(),
            seed,
            passed: true,
            assertions: Vec::new(),
            values: BTreeMap::new(),
            error: None,
        }
    }

    pub fn push(&mut self, a: Assertion) {
        self.passed &= a.passed;
        self.assertions.push(a);
    }

    pub fn extend(&mut self, items: impl IntoIterator<Item = Assertion>) {
        for a in items {
            self.push(a);
        }
    }

    pub fn record(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn fail(&mut self, error: impl Into<String>) {
        self.passed = false;
        self.error = Some(error.into());
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }
}

/// Shape tolerance for surface invariants, relative to `K`.
pub const SHAPE_TOL: f64 = 1e-7;
/// Complementarity tolerance, relative to `K`.
pub const COMPLEMENTARITY_TOL: f64 = 1e-8;

/// Structural invariants of a solved surface: obstacle, European floor,
/// convexity and monotonicity, boundary ordering `0 < b ≤ b_e ≤ K` and
/// near-monotonicity in `θ`, complementarity.
pub fn surface_invariants(surface: &PriceSurface) -> Vec<Assertion> {
    let k = surface.strike;
    let d = &surface.diagnostics;
    let tol = SHAPE_TOL * k;
    let curve = &surface.boundary;
    // b ≤ b_e up to one cell, b ≤ K, b > 0, skipping θ = 0
    let cell = surface.dx.exp();
    let mut order = 0.0f64;
    let mut positive = true;
    let mut missing = 0usize;
    for i in 0..curve.thetas.len() {
        if curve.thetas[i] <= 0.0 {
            continue;
        }
        match curve.b[i] {
            Some(b) => {
                positive &= b > 0.0;
                order = order.max(b / k - 1.0);
                if let Some(be) = curve.b_e[i] {
                    order = order.max(b / (be * cell) - 1.0);
                    order = order.max(be / k - 1.0);
                }
            }
            None => missing += 1,
        }
    }
    vec![
        Assertion::at_most("price_above_payoff", d.below_payoff, tol),
        Assertion::at_most("price_above_european", d.below_european, tol),
        Assertion::at_most("convex_in_spot", d.convexity, tol),
        Assertion::at_most("nonincreasing_in_spot", d.increasing_in_x, tol),
        Assertion::at_most("nondecreasing_in_theta", d.decreasing_in_theta, tol),
        Assertion::holds("boundary_positive", positive && missing == 0)
            .with_note(format!("{missing} slices without an exercise node")),
        Assertion::at_most("boundary_ordering", order, 0.0).with_note("b ≤ b_e (one cell) ≤ K, relative excess"),
        Assertion::at_most("boundary_monotone_cells", curve.max_increase_cells(), 1.0),
        Assertion::at_most("complementarity", d.complementarity, COMPLEMENTARITY_TOL * k),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_tracks_failures() {
        let mut s = Summary::new("c", "verify", 1);
        s.push(Assertion::within("a", 1.0, 1.0 + 1e-9, 1e-8));
        assert!(s.passed);
        s.push(Assertion::relative("b", 1.2, 1.0, 0.1));
        assert!(!s.passed);
        assert_eq!(s.failures().count(), 1);
        assert!(Assertion::between("c", 0.7, 0.5, 1.2).passed);
        assert!(Assertion::holds("d", false).line().starts_with("FAIL d"));
    }
}
