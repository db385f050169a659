pub mod american;
pub mod asymptotics;
pub mod config;
pub mod error;
pub mod european;
pub mod io;
pub mod measure;
pub mod model;
pub mod quadrature;
pub mod simulation;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
