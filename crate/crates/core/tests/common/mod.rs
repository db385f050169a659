#![allow(dead_code)]

use levy_put::measure::{Atoms, DoubleExponential, JumpMeasure, TemperedStableNegative};
use levy_put::model::{make_model, LevyModel, MarketParams};

pub fn market(r: f64, delta: f64, maturity: f64) -> MarketParams {
    MarketParams::new(r, delta, 100.0, maturity, 100.0).unwrap()
}

pub fn black_scholes(sigma: f64, r: f64, delta: f64, maturity: f64) -> LevyModel {
    make_model(sigma, JumpMeasure::none(), market(r, delta, maturity)).unwrap()
}

pub fn single_atom(sigma: f64, y: f64, lambda: f64, r: f64, maturity: f64) -> LevyModel {
    let nu = JumpMeasure::none().with(Atoms::single(y, lambda).unwrap());
    make_model(sigma, nu, market(r, 0.0, maturity)).unwrap()
}

pub fn tempered_stable(alpha: f64, r: f64, maturity: f64) -> LevyModel {
    let nu = JumpMeasure::none().with(TemperedStableNegative::constant(alpha, 1.0, -1.0).unwrap());
    make_model(0.0, nu, market(r, 0.0, maturity)).unwrap()
}

pub fn kou(sigma: f64, r: f64) -> LevyModel {
    let nu = JumpMeasure::none().with(DoubleExponential::new(3.0, 0.3, 12.0, 6.0).unwrap());
    make_model(sigma, nu, market(r, 0.0, 1.0)).unwrap()
}
