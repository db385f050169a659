//! Experiment configuration. A TOML file with the sections below; every
//! schema error carries the line it refers to.
//!
//! ```toml
//! experiment = "boundary"        # price | boundary | asympt | simcheck | verify
//! output_dir = "out/fv"
//! seed = 7
//!
//! [model]
//! sigma = 0.0
//! family = "compound_poisson"    # see `measure::registry::FAMILIES`
//! locations = [-0.2]
//! intensities = [5.0]
//!
//! [market]
//! r = 0.06
//! delta = 0.0
//! strike = 100.0
//! maturity = 1.0
//! spot = 100.0                   # optional, defaults to strike
//!
//! [grid]
//! n_x = 2000
//! n_t = 400
//! theta_min = 1e-4
//! epsilon = 0.01
//! solver = "brennan_schwartz"    # optional
//!
//! [asympt]                       # optional
//! window = [1e-4, 1e-2]          # fractions of the maturity
//!
//! [simcheck]                     # optional
//! n = 100000
//! ladder = [1e-2, 1e-3, 1e-4]
//! u_max = 10.0
//! u_step = 0.25
//! eps_scale = 0.01
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use toml::Spanned;

use crate::american::{GridSpec, LCP_SOLVERS};
use crate::error::{Error, Result};
use crate::measure::registry::{self, ParamSource};
use crate::measure::JumpMeasure;
use crate::model::{make_model, LevyModel, MarketParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Price,
    Boundary,
    Asympt,
    Simcheck,
    Verify,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Price,
        ExperimentKind::Boundary,
        ExperimentKind::Asympt,
        ExperimentKind::Simcheck,
        ExperimentKind::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Price => "price",
            ExperimentKind::Boundary => "boundary",
            ExperimentKind::Asympt => "asympt",
            ExperimentKind::Simcheck => "simcheck",
            ExperimentKind::Verify => "verify",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct SimSettings {
    pub n: usize,
    pub ladder: Vec<f64>,
    pub u_max: f64,
    pub u_step: f64,
    pub eps_scale: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings { n: 100_000, ladder: vec![1e-2, 1e-3, 1e-4], u_max: 10.0, u_step: 0.25, eps_scale: 0.01 }
    }
}

impl SimSettings {
    pub fn u_grid(&self) -> Vec<f64> {
        let k = (self.u_max / self.u_step).round() as i64;
        (-k..=k).map(|i| i as f64 * self.u_step).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub experiment: Option<ExperimentKind>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub model: LevyModel,
    pub family: String,
    pub grid: GridSpec,
    pub solver: String,
    /// Fit window as fractions of the maturity.
    pub window: (f64, f64),
    pub sim: SimSettings,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    experiment: Option<Spanned<String>>,
    output_dir: Option<String>,
    seed: Option<Spanned<i64>>,
    model: Option<Spanned<toml::Table>>,
    market: Option<Spanned<toml::Table>>,
    grid: Option<Spanned<toml::Table>>,
    asympt: Option<Spanned<toml::Table>>,
    simcheck: Option<Spanned<toml::Table>>,
}

/// Byte offset → 1-based line.
fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn at(src: &str, offset: usize, msg: impl fmt::Display) -> Error {
    Error::Config(format!("line {}: {msg}", line_of(src, offset)))
}

/// A section with its location, used to anchor errors.
struct Section<'a> {
    src: &'a str,
    name: &'static str,
    start: usize,
    table: &'a toml::Table,
}

impl<'a> Section<'a> {
    fn new(src: &'a str, name: &'static str, s: &'a Spanned<toml::Table>) -> Self {
        // the span covers the table body; anchor on its header
        let body = s.span().start;
        let header = src.find(&format!("[{name}]")).unwrap_or(body);
        Section { src, name, start: header, table: s.get_ref() }
    }

    fn key_line(&self, key: &str) -> usize {
        let tail = &self.src[self.start..];
        tail.lines()
            .position(|l| l.trim_start().starts_with(key) && l[l.find(key).unwrap() + key.len()..].trim_start().starts_with('='))
            .map(|i| line_of(self.src, self.start) + i)
            .unwrap_or_else(|| line_of(self.src, self.start))
    }

    fn err(&self, key: &str, msg: impl fmt::Display) -> Error {
        Error::Config(format!("line {}: {}.{key}: {msg}", self.key_line(key), self.name))
    }

    fn missing(&self, key: &str) -> Error {
        Error::Config(format!(
            "line {}: section [{}] is missing key `{}.{key}`",
            line_of(self.src, self.start),
            self.name,
            self.name
        ))
    }

    /// Re-anchors an error from the parameter layer.
    fn wrap(&self, e: Error) -> Error {
        match e {
            Error::Config(msg) => {
                let key = msg.split('`').nth(1).unwrap_or("").to_string();
                if msg.starts_with("missing key") {
                    self.missing(&key)
                } else {
                    self.err(&key, msg)
                }
            }
            other => Error::Config(format!("line {}: [{}]: {other}", line_of(self.src, self.start), self.name)),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.table.number(key).map_err(|e| self.wrap(e))
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| self.missing(key))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(v)) if *v > 0 => Ok(Some(*v as usize)),
            Some(_) => Err(self.err(key, "must be a positive integer")),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(self.err(key, "must be a string")),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.table.list(key).map_err(|e| self.wrap(e))
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        match self.table.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(self.err(k, "unknown key")),
            None => Ok(()),
        }
    }
}

fn section<'a>(src: &'a str, name: &'static str, s: &'a Option<Spanned<toml::Table>>) -> Result<Section<'a>> {
    s.as_ref()
        .map(|t| Section::new(src, name, t))
        .ok_or_else(|| Error::Config(format!("line 1: missing section [{name}]")))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment").to_string();
        Self::parse(&name, &src)
    }

    pub fn parse(name: &str, src: &str) -> Result<Self> {
        let raw: Raw = toml::from_str(src).map_err(|e| match e.span() {
            Some(span) => at(src, span.start, e.message()),
            None => Error::Config(e.message().to_string()),
        })?;

        let experiment = match &raw.experiment {
            Some(s) => Some(s.get_ref().parse::<ExperimentKind>().map_err(|e| at(src, s.span().start, e))?),
            None => None,
        };
        let seed = match &raw.seed {
            Some(s) if *s.get_ref() >= 0 => *s.get_ref() as u64,
            Some(s) => return Err(at(src, s.span().start, "seed must be nonnegative")),
            None => 0,
        };

        let market = section(src, "market", &raw.market)?;
        market.reject_unknown(&["r", "delta", "strike", "maturity", "spot"])?;
        let strike = market.require("strike")?;
        let mp = MarketParams::new(
            market.require("r")?,
            market.number("delta")?.unwrap_or(0.0),
            strike,
            market.require("maturity")?,
            market.number("spot")?.unwrap_or(strike),
        )
        .map_err(|e| market.wrap(e))?;

        let model_sec = section(src, "model", &raw.model)?;
        let family_name = model_sec.string("family")?.ok_or_else(|| model_sec.missing("family"))?;
        let family = registry::lookup(family_name).map_err(|e| model_sec.err("family", e))?;
        let mut known = vec!["family", "sigma"];
        known.extend_from_slice(family.required);
        known.extend_from_slice(family.optional);
        model_sec.reject_unknown(&known)?;
        let sigma = model_sec.number("sigma")?.unwrap_or(0.0);
        let components = (family.build)(model_sec.table).map_err(|e| model_sec.wrap(e))?;
        let model = make_model(sigma, JumpMeasure::new(components), mp).map_err(|e| model_sec.wrap(e))?;

        let grid_sec = section(src, "grid", &raw.grid)?;
        grid_sec.reject_unknown(&["n_x", "n_t", "theta_min", "epsilon", "solver", "band", "half_width"])?;
        let n_x = grid_sec.count("n_x")?.ok_or_else(|| grid_sec.missing("n_x"))?;
        let n_t = grid_sec.count("n_t")?.ok_or_else(|| grid_sec.missing("n_t"))?;
        let theta_min = grid_sec.require("theta_min")?;
        if !(theta_min > 0.0 && theta_min < mp.maturity) {
            return Err(grid_sec.err("theta_min", format!("must lie in (0, T = {})", mp.maturity)));
        }
        let epsilon = grid_sec.require("epsilon")?;
        if !(epsilon >= 0.0) {
            return Err(grid_sec.err("epsilon", "must be nonnegative"));
        }
        let mut grid = GridSpec::new(n_x, n_t, theta_min, epsilon);
        if let Some(b) = grid_sec.count("band")? {
            grid.band = b;
        }
        if let Some(h) = grid_sec.number("half_width")? {
            grid.half_width = Some(h);
        }
        let solver = grid_sec.string("solver")?.unwrap_or(LCP_SOLVERS[0].name).to_string();
        if !LCP_SOLVERS.iter().any(|e| e.name == solver) {
            let names: Vec<_> = LCP_SOLVERS.iter().map(|e| e.name).collect();
            return Err(grid_sec.err("solver", format!("unknown solver `{solver}`; known: {}", names.join(", "))));
        }

        let mut window = (1e-4, 1e-2);
        if let Some(s) = &raw.asympt {
            let sec = Section::new(src, "asympt", s);
            sec.reject_unknown(&["window"])?;
            if let Some(w) = sec.list("window")? {
                match w.as_slice() {
                    [lo, hi] if *lo > 0.0 && lo < hi && *hi <= 0.5 => window = (*lo, *hi),
                    _ => return Err(sec.err("window", "must be [lo, hi] with 0 < lo < hi <= 0.5")),
                }
            }
        }

        let mut sim = SimSettings::default();
        if let Some(s) = &raw.simcheck {
            let sec = Section::new(src, "simcheck", s);
            sec.reject_unknown(&["n", "ladder", "u_max", "u_step", "eps_scale"])?;
            if let Some(n) = sec.count("n")? {
                sim.n = n;
            }
            if let Some(l) = sec.list("ladder")? {
                if l.is_empty() || l.iter().any(|t| !(*t > 0.0)) {
                    return Err(sec.err("ladder", "must be a nonempty list of positive horizons"));
                }
                sim.ladder = l;
            }
            for (key, slot) in [("u_max", &mut sim.u_max), ("u_step", &mut sim.u_step), ("eps_scale", &mut sim.eps_scale)] {
                if let Some(v) = sec.number(key)? {
                    if !(v > 0.0) {
                        return Err(sec.err(key, "must be positive"));
                    }
                    *slot = v;
                }
            }
        }

        Ok(ExperimentConfig {
            name: name.to_string(),
            experiment,
            output_dir: raw.output_dir.map(PathBuf::from),
            seed,
            model,
            family: family.name.to_string(),
            grid,
            solver,
            window,
            sim,
        })
    }
}
