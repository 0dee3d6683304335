//! Command-line front end: JSON configs in, CSV tables, optional SVG charts
//! and a JSON manifest out.
//!
//! Subcommands `path`, `moments`, `holder` and `verify`. Exit codes: 0 on
//! success, 2 for configuration (and I/O) errors, 3 for numerical failures,
//! 4 when an acceptance check fails.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::engine::EngineError;
use crate::estimation::EstimationError;

pub use commands::{cmd_holder, cmd_moments, cmd_path, cmd_verify, RunOptions};
pub use config::{RunConfig, RunManifest};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("acceptance failure: {0}")]
    Acceptance(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Acceptance(_) => 4,
        }
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::from(EstimationError::from(e))
    }
}

#[derive(Debug, Parser)]
#[command(name = "multistable", version, about = "Simulate multistable processes and check their scaling laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample diagonal paths on a grid.
    Path(RunArgs),
    /// Estimate increment moments and fit their scaling in eps.
    Moments(RunArgs),
    /// Pathwise Hölder exponent estimates.
    Holder(RunArgs),
    /// Run the acceptance checks (built-in full profile without --config).
    Verify(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON config, or a manifest from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write SVG charts.
    #[arg(long)]
    pub svg: bool,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (name, args) = match &cli.command {
        Command::Path(a) => ("path", a),
        Command::Moments(a) => ("moments", a),
        Command::Holder(a) => ("holder", a),
        Command::Verify(a) => ("verify", a),
    };
    if args.workers == 0 {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None if name == "verify" => RunConfig::default(),
        None => return Err(CliError::Config("--config is required".into())),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let opts = RunOptions {
        out: args.out.clone(),
        svg: args.svg,
        workers: args.workers,
    };
    match cli.command {
        Command::Path(_) => cmd_path(&cfg, &opts).map(|_| ()),
        Command::Moments(_) => cmd_moments(&cfg, &opts).map(|_| ()),
        Command::Holder(_) => cmd_holder(&cfg, &opts).map(|_| ()),
        Command::Verify(_) => {
            let (_, outcomes) = cmd_verify(&cfg, &opts)?;
            for o in &outcomes {
                println!("{}", o.summary_line());
            }
            let failed: Vec<String> = outcomes
                .iter()
                .filter(|o| !o.passed())
                .map(|o| format!("criterion {} ({})", o.criterion, o.name))
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Acceptance(failed.join(", ")))
            }
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
