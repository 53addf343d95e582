//! `qrep`: link states, self-validation and rate sweeps from a JSON config.
//!
//! Exit codes: 0 success, 1 validation or runtime failure, 2 config error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::SweepKind;
use config::{parse_config, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Sim(#[from] qrep::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Sim(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qrep",
    version,
    about = "Quantum repeater link and rate simulator"
)]
struct Cli {
    /// JSON run configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `out_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the Monte Carlo checks, overriding `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Link density matrices and fidelities at the configured point.
    Elink,
    /// Run the self-check suite; exits 1 if any check fails.
    Validate,
    /// Write one sweep table as CSV.
    Sweep {
        #[arg(long = "sweep", value_enum)]
        kind: SweepKind,
    },
}

/// Caps rayon's pool at `QREP_THREADS` when set.
fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("QREP_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "`QREP_THREADS`: expected a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("`QREP_THREADS`: {e}")))
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    init_threads()?;
    let cfg = load(cli)?;
    match cli.command {
        Command::Elink => {
            let path = commands::cmd_elink(&cfg)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Validate => {
            let report = commands::cmd_validate(&cfg)?;
            for c in &report.checks {
                let observed = c
                    .observed
                    .map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}"));
                println!(
                    "{} {:<36} observed {observed:>10}  tol {:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.tolerance
                );
            }
            println!(
                "wrote {}",
                cfg.out_dir.join("validate_report.json").display()
            );
            Ok(report.passed)
        }
        Command::Sweep { kind } => {
            let path = commands::cmd_sweep(&cfg, kind)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qrep: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
