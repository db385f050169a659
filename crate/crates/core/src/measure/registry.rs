//! Name → constructor table for Lévy-measure families.

use std::sync::Arc;

use super::{Atom, Atoms, DoubleExponential, ExponentialTail, GammaLike, JumpComponent, TemperedStableNegative};
use crate::error::{Error, Result};

/// Keyed numeric parameters for a family constructor.
pub trait ParamSource {
    fn number(&self, key: &str) -> Result<Option<f64>>;
    fn list(&self, key: &str) -> Result<Option<Vec<f64>>>;

    fn require(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    fn require_list(&self, key: &str) -> Result<Vec<f64>> {
        self.list(key)?
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }
}

impl ParamSource for toml::Table {
    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(v)) => Ok(Some(*v)),
            Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(Error::Config(format!(
                "key `{key}` must be a number, found {}",
                other.type_str()
            ))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    toml::Value::Float(x) => Ok(*x),
                    toml::Value::Integer(x) => Ok(*x as f64),
                    other => Err(Error::Config(format!(
                        "key `{key}` must hold numbers, found {}",
                        other.type_str()
                    ))),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(other) => Err(Error::Config(format!(
                "key `{key}` must be an array, found {}",
                other.type_str()
            ))),
        }
    }
}

pub type Components = Vec<Arc<dyn JumpComponent>>;
pub type Builder = fn(&dyn ParamSource) -> Result<Components>;

pub struct Family {
    pub name: &'static str,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
    pub build: Builder,
}

pub static FAMILIES: &[Family] = &[
    Family { name: "none", required: &[], optional: &[], build: build_none },
    Family {
        name: "compound_poisson",
        required: &["locations", "intensities"],
        optional: &[],
        build: build_compound_poisson,
    },
    Family {
        name: "double_exponential",
        required: &["lambda", "p", "eta_up", "eta_down"],
        optional: &[],
        build: build_double_exponential,
    },
    Family {
        name: "tempered_stable_negative",
        required: &["alpha", "eta0", "a0"],
        optional: &["plus_intensity", "plus_rate"],
        build: build_tempered_stable,
    },
    Family { name: "gamma_like", required: &["c", "g", "m"], optional: &[], build: build_gamma_like },
];

pub fn lookup(name: &str) -> Result<&'static Family> {
    FAMILIES.iter().find(|f| f.name == name).ok_or_else(|| {
        let known: Vec<_> = FAMILIES.iter().map(|f| f.name).collect();
        Error::Config(format!("unknown jump family `{name}`; known: {}", known.join(", ")))
    })
}

pub fn build(name: &str, params: &dyn ParamSource) -> Result<Components> {
    (lookup(name)?.build)(params)
}

fn build_none(_: &dyn ParamSource) -> Result<Components> {
    Ok(Vec::new())
}

fn build_compound_poisson(p: &dyn ParamSource) -> Result<Components> {
    let locations = p.require_list("locations")?;
    let intensities = p.require_list("intensities")?;
    if locations.len() != intensities.len() {
        return Err(Error::Config(format!(
            "`locations` has {} entries but `intensities` has {}",
            locations.len(),
            intensities.len()
        )));
    }
    let atoms = locations
        .into_iter()
        .zip(intensities)
        .map(|(location, intensity)| Atom { location, intensity })
        .collect();
    Ok(vec![Arc::new(Atoms::new(atoms)?)])
}

fn build_double_exponential(p: &dyn ParamSource) -> Result<Components> {
    Ok(vec![Arc::new(DoubleExponential::new(
        p.require("lambda")?,
        p.require("p")?,
        p.require("eta_up")?,
        p.require("eta_down")?,
    )?)])
}

fn build_tempered_stable(p: &dyn ParamSource) -> Result<Components> {
    let mut out: Components = vec![Arc::new(TemperedStableNegative::constant(
        p.require("alpha")?,
        p.require("eta0")?,
        p.require("a0")?,
    )?)];
    match (p.number("plus_intensity")?, p.number("plus_rate")?) {
        (Some(l), Some(b)) => out.push(Arc::new(ExponentialTail::new(l, b)?)),
        (None, None) => {}
        _ => {
            return Err(Error::Config(
                "`plus_intensity` and `plus_rate` must be given together".into(),
            ))
        }
    }
    Ok(out)
}

fn build_gamma_like(p: &dyn ParamSource) -> Result<Components> {
    Ok(vec![Arc::new(GammaLike::new(p.require("c")?, p.require("g")?, p.require("m")?)?)])
}
