//! Command-line driver for the `puncta` laboratory.
//!
//! All work is declared in one TOML config; the subcommand picks which
//! section runs. The flags `--out`, `--seed`, and `--jobs` override the
//! matching top-level config keys (flag beats file, file beats built-in
//! default). Exit codes: 0 all checks passed, 1 a check failed, 2 the
//! config was rejected, 3 a runtime failure (solver breakdown, i/o).

mod bounds_cmd;
mod config;
mod fields;
mod metric_eval;
mod records;
mod solve_cmd;
mod verify_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// The configuration or command line is invalid; nothing was computed.
    Config(String),
    /// The computation itself broke down after a valid configuration.
    Runtime(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "puncta",
    version,
    about = "Numerical laboratory for conformal densities with negative curvature near an isolated singularity",
    after_help = "Option precedence: a command-line flag overrides the matching config key, \
which overrides the built-in default.\n\nExit codes: 0 all checks passed, 1 a check failed, \
2 invalid configuration, 3 runtime failure."
)]
struct Cli {
    /// Experiment configuration file (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for output files (stdout always carries the same bytes)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for randomized checks
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads for the data-parallel kernels
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate a density and its measured curvature on a polar sample plan
    MetricEval,
    /// Solve the curvature equation on an annulus
    Solve,
    /// Run theorem checks and emit one verdict record per line
    Verify,
    /// Evaluate the Γ-product bound for three-puncture configurations
    Bounds,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let file = config::FileConfig::load(&config_path)?;
    let out_dir = cli.out.or_else(|| file.out.clone());

    if let Some(n) = cli.jobs.or(file.jobs) {
        if n == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }

    match cli.cmd {
        Cmd::MetricEval => {
            let section = file.metric_eval.as_ref().ok_or_else(|| {
                CliError::Config("config has no [metric_eval] section".into())
            })?;
            metric_eval::run(section, out_dir.as_deref())?;
            Ok(true)
        }
        Cmd::Solve => {
            let section = file
                .solve
                .as_ref()
                .ok_or_else(|| CliError::Config("config has no [solve] section".into()))?;
            solve_cmd::run(section, out_dir.as_deref())
        }
        Cmd::Verify => {
            let section = file
                .verify
                .as_ref()
                .ok_or_else(|| CliError::Config("config has no [verify] section".into()))?;
            let seed = cli.seed.or(section.seed).or(file.seed).unwrap_or(0);
            verify_cmd::run(section, seed, out_dir.as_deref())
        }
        Cmd::Bounds => {
            let section = file
                .bounds
                .as_ref()
                .ok_or_else(|| CliError::Config("config has no [bounds] section".into()))?;
            bounds_cmd::run(section, out_dir.as_deref())
        }
    }
}
