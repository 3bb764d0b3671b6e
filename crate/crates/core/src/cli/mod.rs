//! The `ctdi` command-line front end.
//!
//! Each subcommand runs one experiment, writes its CSV/JSON artifacts plus a
//! `manifest.json` into `--out`, and reports through the exit status:
//! 0 when every tolerance is met, 1 on a tolerance failure, 2 on a usage,
//! configuration or I/O error.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use config::{parse_config, ExperimentConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Bad flags, config or parameter values; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<crate::Error> for UsageError {
    fn from(e: crate::Error) -> Self {
        UsageError(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "ctdi", version, about = "Directed information experiments for Gaussian and Poisson channels with feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Causal-MMSE estimate of directed information vs ½ln(1+T).
    GaussianDuncan(CommonArgs),
    /// Analytic vs Monte Carlo directed-information rate over a p grid.
    PoissonRate(CommonArgs),
    /// Binary-input capacity as a function of λ₂.
    PoissonCapacity(CommonArgs),
    /// Property suites for exact discrete directed information.
    DiDiscrete(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// key = value config file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed (overrides the `seed` key)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "ctdi-out")]
    out: PathBuf,
    /// Replica / instance count (overrides the `replicas` key)
    #[arg(long, value_name = "N")]
    replicas: Option<usize>,
    /// Worker threads; 0 uses all cores
    #[arg(long, value_name = "N", env = "CTDI_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Override any config key
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

/// Artifacts and verdict of one experiment.
pub(crate) struct Outcome {
    pub files: Vec<(String, Vec<u8>)>,
    pub passed: bool,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
    /// Reasons for failure, printed to stderr.
    pub failures: Vec<String>,
}

type CommandFn = fn(&ExperimentConfig) -> Result<Outcome, UsageError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_TOLERANCE,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli) -> Result<bool, UsageError> {
    let (name, args, defaults, body): (&str, CommonArgs, &[config::KeySpec], CommandFn) =
        match cli.command {
            Command::GaussianDuncan(a) => ("gaussian-duncan", a, commands::GAUSSIAN_KEYS, commands::gaussian_duncan),
            Command::PoissonRate(a) => ("poisson-rate", a, commands::POISSON_RATE_KEYS, commands::poisson_rate),
            Command::PoissonCapacity(a) => ("poisson-capacity", a, commands::CAPACITY_KEYS, commands::poisson_capacity),
            Command::DiDiscrete(a) => ("di-discrete", a, commands::DISCRETE_KEYS, commands::di_discrete),
        };
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);

    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    let overrides = flag_overrides(name, &args, defaults)?;
    let config = ExperimentConfig::resolve(defaults, file, overrides)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| UsageError(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| body(&config))?;

    for line in &outcome.summary {
        println!("{line}");
    }
    for line in &outcome.failures {
        eprintln!("tolerance failure: {line}");
    }

    let outputs: Vec<&str> = outcome.files.iter().map(|(n, _)| n.as_str()).collect();
    let manifest = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config.values(),
        "config_file": args.config.as_ref().map(|p| p.display().to_string()),
        "out": args.out.display().to_string(),
        "jobs": pool.current_num_threads(),
        "outputs": outputs,
        "passed": outcome.passed,
        "started_unix": started_unix,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    let manifest = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write_outputs(&args.out, &outcome.files, &manifest)?;
    println!("{}: {}", name, if outcome.passed { "PASS" } else { "FAIL" });
    Ok(outcome.passed)
}

fn flag_overrides(
    name: &str,
    args: &CommonArgs,
    defaults: &[config::KeySpec],
) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (flag, key, value) in [
        ("--seed", "seed", args.seed.map(|v| v.to_string())),
        ("--replicas", "replicas", args.replicas.map(|v| v.to_string())),
    ] {
        if let Some(v) = value {
            if !defaults.iter().any(|(k, _)| *k == key) {
                return Err(UsageError(format!("{flag} has no effect on {name}")));
            }
            out.insert(key.to_string(), v);
        }
    }
    for item in &args.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| UsageError(format!("--set expects KEY=VALUE, got `{item}`")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn write_outputs(dir: &Path, files: &[(String, Vec<u8>)], manifest: &[u8]) -> Result<(), UsageError> {
    let io = |e: std::io::Error| UsageError(format!("writing to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for (name, bytes) in files {
        fs::write(dir.join(name), bytes).map_err(io)?;
    }
    fs::write(dir.join("manifest.json"), manifest).map_err(io)
}
