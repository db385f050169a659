use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levy-put"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.toml"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn verify_black_scholes_passes() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--config", config("black_scholes").to_str().unwrap(), "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let s = summary(out.path());
    assert_eq!(s["passed"], true);
    assert_eq!(s["seed"], 1);
    let names: Vec<&str> = s["assertions"].as_array().unwrap().iter().map(|a| a["name"].as_str().unwrap()).collect();
    for want in ["american_vs_binomial_1K", "european_fourier_closed_form_1K", "complementarity"] {
        assert!(names.contains(&want), "{names:?}");
    }
    let header = fs::read_to_string(out.path().join("surface.csv")).unwrap();
    assert!(header.starts_with("theta,x,american,european,premium\n"));
}

#[test]
fn missing_rate_exits_with_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(config("black_scholes")).unwrap().replace("r = 0.05\n", "");
    let path = dir.path().join("broken.toml");
    fs::write(&path, src).unwrap();
    let o = run(&["price", "--config", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("market.r") && err.contains("line "), "{err}");
}

#[test]
fn unknown_key_and_bad_experiment_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(config("black_scholes")).unwrap();
    let path = dir.path().join("a.toml");
    fs::write(&path, src.replace("epsilon = 0.0", "epsilon = 0.0\nnx = 3")).unwrap();
    let o = run(&["price", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.nx"));
    fs::write(&path, src.replace("\"verify\"", "\"plot\"")).unwrap();
    let o = run(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

fn boundary_csv(dir: &Path) -> String {
    let o = run(&["boundary", "--config", config("finite_variation").to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    fs::read_to_string(dir.join("boundary.csv")).unwrap()
}

#[test]
fn finite_variation_boundary_is_positive_below_strike_and_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let csv = boundary_csv(a.path());
    assert_eq!(csv, boundary_csv(b.path()));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta,b,b_e,zeta"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let b: f64 = cols[1].parse().unwrap();
        assert!(b > 0.0 && b <= 100.0, "{line}");
        rows += 1;
    }
    assert!(rows > 100);
}

#[test]
fn several_configs_run_into_subdirectories() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        "--config",
        config("sub_strike").to_str().unwrap(),
        "--config",
        config("finite_variation").to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
        "--threads",
        "2",
        "--seed",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    for name in ["sub_strike", "finite_variation"] {
        let dir = out.path().join(name);
        assert!(dir.join("fits.csv").exists());
        let s = summary(&dir);
        assert_eq!(s["experiment"], "asympt");
        assert_eq!(s["seed"], 9);
    }
    let fits = fs::read_to_string(out.path().join("finite_variation/fits.csv")).unwrap();
    assert!(fits.starts_with("regime,window_lo,window_hi,exponent,constant,target,r2\n"));
}

#[test]
fn simcheck_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(config("finite_variation")).unwrap() + "\n[simcheck]\nn = 20000\n";
    let path = dir.path().join("fv.toml");
    fs::write(&path, src).unwrap();
    let o = run(&["simcheck", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(dir.path().join("simreport.csv")).unwrap();
    assert!(csv.starts_with("check,t,estimate,stderr,target,zscore\n"));
    assert!(csv.contains("drift_median"));
}
