//! Command-line front end: χ densities, reconciliation FER sweeps, key-rate
//! curves and code construction, each driven by a JSON config.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration, 3 file or data, 4
//! numerical failure.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "octorecon", version, about = "Multidimensional reconciliation toolkit for CV-QKD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tabulate the χ density of frame norms (CSV: n,r,density).
    ChiPdf,
    /// Frame error rate of 8-D reconciliation over a range of SNRs.
    Reconcile,
    /// Secret key rate against distance with V_A optimized per point.
    Keyrate,
    /// Build a PEG parity-check matrix and print it as alist.
    GenCode,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let output = commands::execute(cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, output)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&output)
                .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
        }
    }
}
