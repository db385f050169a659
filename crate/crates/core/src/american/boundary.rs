use serde::Serialize;

use crate::io::{num, opt_num, Table};

/// Critical prices per time-to-maturity slice. `b` is `None` on slices where
/// no exercise node was found.
#[derive(Debug, Clone, Default, Serialize)]
pub struct BoundaryCurve {
    pub strike: f64,
    pub thetas: Vec<f64>,
    pub b: Vec<Option<f64>>,
    pub b_e: Vec<Option<f64>>,
    /// `K / b_e - 1`
    pub zeta: Vec<Option<f64>>,
    /// Grid spacing in log-price, used as the one-cell tolerance.
    pub dx: f64,
    pub warnings: Vec<String>,
}

impl BoundaryCurve {
    pub const HEADER: [&'static str; 4] = ["theta", "b", "b_e", "zeta"];

    pub fn new(strike: f64, dx: f64) -> Self {
        BoundaryCurve { strike, dx, ..Default::default() }
    }

    pub fn push(&mut self, theta: f64, b: Option<f64>, b_e: Option<f64>) {
        if b.is_none() {
            self.warnings.push(format!("no exercise region at θ = {theta:e}"));
        }
        self.thetas.push(theta);
        self.b.push(b);
        self.b_e.push(b_e);
        self.zeta.push(b_e.map(|v| self.strike / v - 1.0));
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&Self::HEADER);
        for i in 0..self.thetas.len() {
            t.push(vec![num(self.thetas[i]), opt_num(self.b[i]), opt_num(self.b_e[i]), opt_num(self.zeta[i])]);
        }
        t
    }

    /// Linear interpolation of `b` in `θ`; `None` across missing points.
    pub fn b_at(&self, theta: f64) -> Option<f64> {
        interp(&self.thetas, &self.b, theta)
    }

    pub fn b_e_at(&self, theta: f64) -> Option<f64> {
        interp(&self.thetas, &self.b_e, theta)
    }

    /// `(θ, b)` pairs with `lo ≤ θ ≤ hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.thetas
            .iter()
            .zip(&self.b)
            .filter(|(t, b)| **t >= lo && **t <= hi && b.is_some())
            .map(|(t, b)| (*t, b.expect("filtered")))
            .collect()
    }

    pub fn window_e(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.thetas
            .iter()
            .zip(&self.b_e)
            .filter(|(t, b)| **t >= lo && **t <= hi && b.is_some())
            .map(|(t, b)| (*t, b.expect("filtered")))
            .collect()
    }

    /// Largest increase of `ln b` between consecutive slices, in cells.
    pub fn max_increase_cells(&self) -> f64 {
        let pts: Vec<f64> = self.b.iter().flatten().map(|v| v.ln()).collect();
        pts.windows(2).map(|w| (w[1] - w[0]) / self.dx).fold(0.0, f64::max)
    }
}

fn interp(xs: &[f64], ys: &[Option<f64>], x: f64) -> Option<f64> {
    if xs.is_empty() || x < xs[0] || x > *xs.last()? {
        return None;
    }
    let i = xs.partition_point(|&t| t < x);
    if i == 0 {
        return ys[0];
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let (y0, y1) = (ys[i - 1]?, ys[i]?);
    if x1 == x0 {
        return Some(y1);
    }
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// American critical price on one slice. Detection uses the first node with
/// `P - ψ > tol`; the edge is then walked back through the contiguous run with
/// `P > ψ`, since the projection leaves `P = ψ` exactly on exercise nodes.
/// Refined by the linear zero of `P - (K - e^x)` through the first two
/// continuation nodes, clamped to the cell below and to `K`.
pub fn exercise_boundary(x: &[f64], p: &[f64], psi: &[f64], strike: f64, tol: f64) -> Option<f64> {
    let mut first = (0..x.len()).find(|&j| p[j] - psi[j] > tol)?;
    while first > 0 && p[first - 1] - psi[first - 1] > 0.0 {
        first -= 1;
    }
    if first == 0 {
        return None;
    }
    let excess = |j: usize| p[j] - (strike - x[j].exp());
    let e1 = excess(first);
    let xb = if first + 1 < x.len() {
        let slope = (excess(first + 1) - e1) / (x[first + 1] - x[first]);
        if slope > 0.0 { x[first] - e1 / slope } else { x[first] }
    } else {
        x[first]
    };
    let hi = x[first].min(strike.ln()).max(x[first - 1]);
    Some(xb.clamp(x[first - 1], hi).exp().min(strike))
}

/// European critical price: first sign change of `P_e - (K - e^x)`.
pub fn european_crossing(x: &[f64], pe: &[f64], strike: f64) -> Option<f64> {
    let g = |j: usize| pe[j] - (strike - x[j].exp());
    let first = (0..x.len()).find(|&j| g(j) > 0.0)?;
    if first == 0 {
        return None;
    }
    let (g0, g1) = (g(first - 1), g(first));
    let t = g0 / (g0 - g1);
    Some((x[first - 1] + t * (x[first] - x[first - 1])).exp())
}
