//! Batch front-end: one experiment per config, artifacts per output directory.

mod experiments;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use levy_put::config::ExperimentConfig;
use levy_put::error::Error;
use levy_put::verification::Summary;
use rayon::prelude::*;

use experiments::{experiment, Context};

#[derive(Parser)]
#[command(name = "levy-put", about = "American puts under exponential Lévy models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write surface.csv and boundary.csv.
    Price(Args),
    /// Solve and write boundary.csv.
    Boundary(Args),
    /// Near-maturity rate fits; writes fits.csv.
    Asympt(Args),
    /// Monte Carlo checks of small-time limits; writes simreport.csv.
    Simcheck(Args),
    /// Oracle and invariant assertions.
    Verify(Args),
    /// Run the experiment named in each config.
    Run(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Experiment config; repeat to run several concurrently.
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    /// Output directory; with several configs each gets a subdirectory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

const EXIT_ASSERTION: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Io(_) => EXIT_SCHEMA,
        _ => EXIT_NUMERICAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (fixed, args) = match cli.command {
        Command::Price(a) => (Some("price"), a),
        Command::Boundary(a) => (Some("boundary"), a),
        Command::Asympt(a) => (Some("asympt"), a),
        Command::Simcheck(a) => (Some("simcheck"), a),
        Command::Verify(a) => (Some("verify"), a),
        Command::Run(a) => (None, a),
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(EXIT_SCHEMA);
        }
    }
    let several = args.configs.len() > 1;
    let codes: Vec<u8> = args
        .configs
        .par_iter()
        .map(|path| run_one(path, fixed, &args, several))
        .collect();
    ExitCode::from(codes.into_iter().max().unwrap_or(0))
}

fn run_one(path: &Path, fixed: Option<&str>, args: &Args, several: bool) -> u8 {
    let cfg = match ExperimentConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return EXIT_SCHEMA;
        }
    };
    let name = match (fixed, cfg.experiment) {
        (Some(n), _) => n.to_string(),
        (None, Some(k)) => k.name().to_string(),
        (None, None) => {
            eprintln!("{}: line 1: key `experiment` is required by `run`", path.display());
            return EXIT_SCHEMA;
        }
    };
    let base = args.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let out = if several || (args.out.is_none() && cfg.output_dir.is_none()) { base.join(&cfg.name) } else { base };
    let seed = args.seed.unwrap_or(cfg.seed);
    let mut summary = Summary::new(&cfg.name, &name, seed);
    let result = fs::create_dir_all(&out)
        .map_err(Error::from)
        .and_then(|_| experiment(&name))
        .and_then(|exp| exp.run(&Context { cfg: &cfg, out: &out, seed }, &mut summary));
    let code = match &result {
        Ok(()) if summary.passed => 0,
        Ok(()) => EXIT_ASSERTION,
        Err(e) => {
            summary.fail(e.to_string());
            exit_code(e)
        }
    };
    for a in &summary.assertions {
        println!("[{}] {}", cfg.name, a.line());
    }
    if let Err(e) = &result {
        eprintln!("{}: {e}", path.display());
    }
    match serde_json::to_string_pretty(&summary) {
        Ok(json) => {
            if let Err(e) = fs::write(out.join("summary.json"), json + "\n") {
                eprintln!("{}: cannot write summary: {e}", out.display());
                return code.max(EXIT_SCHEMA);
            }
        }
        Err(e) => eprintln!("summary serialization failed: {e}"),
    }
    code
}
