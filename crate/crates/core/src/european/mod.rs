//! European put prices and the European critical price `b_e(θ)`.
//!
//! Pricers implement [`EuropeanPricer`] and are selected by name from
//! [`PRICERS`]. `fourier` routes between the exact Poisson mixture (purely
//! atomic ν) and the contour integral; the other entries force one method.

mod fourier;
mod mixture;
mod monte_carlo;

use serde::Serialize;

pub use fourier::lewis_put;
pub use mixture::mixture_put;
pub use monte_carlo::mc_put;

use crate::error::{Error, Result};
use crate::io::{num, opt_num, Table};
use crate::model::LevyModel;
use crate::quadrature::brent;
use crate::simulation::EpsPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Fourier,
    Mixture,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Fourier => "fourier",
            Method::Mixture => "mixture",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EuropeanQuote {
    pub theta: f64,
    pub spot: f64,
    pub value: f64,
    pub method: Method,
    pub stderr: Option<f64>,
}

impl EuropeanQuote {
    pub const HEADER: [&'static str; 5] = ["theta", "spot", "value", "method", "stderr"];

    pub fn row(&self) -> Vec<String> {
        vec![num(self.theta), num(self.spot), num(self.value), self.method.label().into(), opt_num(self.stderr)]
    }
}

pub fn quotes_table(quotes: &[EuropeanQuote]) -> Table {
    let mut t = Table::new(&EuropeanQuote::HEADER);
    for q in quotes {
        t.push(q.row());
    }
    t
}

pub trait EuropeanPricer: Send + Sync {
    fn name(&self) -> &'static str;
    fn price(&self, model: &LevyModel, spot: f64, theta: f64) -> Result<EuropeanQuote>;
}

#[derive(Debug, Clone, Copy)]
pub struct PricerOptions {
    pub n_paths: usize,
    pub seed: u64,
    pub epsilon: EpsPolicy,
}

impl Default for PricerOptions {
    fn default() -> Self {
        PricerOptions { n_paths: 1_000_000, seed: 0, epsilon: EpsPolicy::Fixed(0.05) }
    }
}

pub struct PricerEntry {
    pub name: &'static str,
    pub build: fn(&PricerOptions) -> Box<dyn EuropeanPricer>,
}

pub static PRICERS: &[PricerEntry] = &[
    PricerEntry { name: "fourier", build: |_| Box::new(Fourier) },
    PricerEntry { name: "contour", build: |_| Box::new(Contour) },
    PricerEntry { name: "mixture", build: |_| Box::new(Mixture) },
    PricerEntry { name: "monte_carlo", build: |o| Box::new(MonteCarlo(*o)) },
];

pub fn pricer(name: &str, opts: &PricerOptions) -> Result<Box<dyn EuropeanPricer>> {
    PRICERS
        .iter()
        .find(|p| p.name == name)
        .map(|p| (p.build)(opts))
        .ok_or_else(|| Error::Config(format!("unknown European pricer `{name}`")))
}

/// Payoff and zero-spot conventions shared by every pricer.
fn trivial(model: &LevyModel, spot: f64, theta: f64, method: Method) -> Option<EuropeanQuote> {
    let k = model.market.strike;
    let value = if theta <= 0.0 {
        (k - spot).max(0.0)
    } else if spot <= 0.0 {
        k * (-model.market.r * theta).exp()
    } else {
        return None;
    };
    Some(EuropeanQuote { theta, spot, value, method, stderr: None })
}

struct Fourier;
struct Contour;
struct Mixture;
struct MonteCarlo(PricerOptions);

impl EuropeanPricer for Fourier {
    fn name(&self) -> &'static str {
        "fourier"
    }

    fn price(&self, model: &LevyModel, spot: f64, theta: f64) -> Result<EuropeanQuote> {
        if model.nu.is_purely_atomic() && !model.nu.is_zero() {
            Mixture.price(model, spot, theta)
        } else {
            Contour.price(model, spot, theta)
        }
    }
}

impl EuropeanPricer for Contour {
    fn name(&self) -> &'static str {
        "contour"
    }

    fn price(&self, model: &LevyModel, spot: f64, theta: f64) -> Result<EuropeanQuote> {
        if let Some(q) = trivial(model, spot, theta, Method::Fourier) {
            return Ok(q);
        }
        let value = lewis_put(model, spot, theta)?;
        Ok(EuropeanQuote { theta, spot, value, method: Method::Fourier, stderr: None })
    }
}

impl EuropeanPricer for Mixture {
    fn name(&self) -> &'static str {
        "mixture"
    }

    fn price(&self, model: &LevyModel, spot: f64, theta: f64) -> Result<EuropeanQuote> {
        if let Some(q) = trivial(model, spot, theta, Method::Mixture) {
            return Ok(q);
        }
        let value = mixture_put(model, spot, theta)?;
        Ok(EuropeanQuote { theta, spot, value, method: Method::Mixture, stderr: None })
    }
}

impl EuropeanPricer for MonteCarlo {
    fn name(&self) -> &'static str {
        "monte_carlo"
    }

    fn price(&self, model: &LevyModel, spot: f64, theta: f64) -> Result<EuropeanQuote> {
        if let Some(q) = trivial(model, spot, theta, Method::MonteCarlo) {
            return Ok(q);
        }
        let o = &self.0;
        let (value, se) = mc_put(model, spot, theta, o.n_paths, o.seed, o.epsilon)?;
        Ok(EuropeanQuote { theta, spot, value, method: Method::MonteCarlo, stderr: Some(se) })
    }
}

pub fn price_put_fourier(model: &LevyModel, spot: f64, theta: f64) -> Result<EuropeanQuote> {
    Fourier.price(model, spot, theta)
}

pub fn price_put_mc(model: &LevyModel, spot: f64, theta: f64, n_paths: usize, seed: u64) -> Result<EuropeanQuote> {
    MonteCarlo(PricerOptions { n_paths, seed, ..PricerOptions::default() }).price(model, spot, theta)
}

/// Root in `(0, K)` of `P_e(θ, x) = K - x`.
pub fn european_boundary(model: &LevyModel, theta: f64) -> Result<f64> {
    european_boundary_with(&Fourier, model, theta)
}

pub fn european_boundary_with(pricer: &dyn EuropeanPricer, model: &LevyModel, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("european_boundary needs θ > 0, got {theta}")));
    }
    let k = model.market.strike;
    if !(model.market.r > 0.0) {
        return Err(Error::Domain("the European critical price needs r > 0".into()));
    }
    let failure = std::cell::RefCell::new(None);
    let f = |x: f64| match pricer.price(model, x, theta) {
        Ok(q) => q.value - (k - x),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e.to_string());
            f64::NAN
        }
    };
    let root = brent(f, 0.0, k, 1e-10 * k, 200);
    if let Some(msg) = failure.into_inner() {
        return Err(Error::Numerical(msg));
    }
    root
}
