//! `tensor-radon`: batch driver for phantoms, transforms, inversions and the
//! checkers.
//!
//! Exit status: 0 success, 1 a checker failed, 2 usage or configuration
//! error, 3 I/O error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Phantom,
    Forward,
    Invert,
    Decompose,
    SliceCheck,
    Reshetnyak,
    RangeCheck,
    UcpOdd,
    UcpEven,
    Selftest,
}

#[derive(Parser, Debug)]
#[command(name = "tensor-radon", version, about = "Generalized Radon transforms of symmetric tensor fields")]
struct Cli {
    command: Command,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `table.key=value`, e.g. `--grid.N=64 --transform.m=2`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

/// How a run ended, mapped to the exit status.
#[derive(Debug)]
pub enum Failure {
    Checker(String),
    Usage(String),
    Io(String),
}

impl From<tensor_radon::Error> for Failure {
    fn from(e: tensor_radon::Error) -> Self {
        use tensor_radon::Error as E;
        match e {
            E::Io(_) | E::Format(_) => Failure::Io(e.to_string()),
            E::InconsistentData { .. } | E::NotInRange { .. } => Failure::Checker(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn threads_from_env() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("TENSOR_RADON_THREADS") else {
        return Ok(());
    };
    let count: usize = raw
        .parse()
        .map_err(|_| Failure::Usage(format!("TENSOR_RADON_THREADS={raw} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = threads_from_env()
        .and_then(|_| config::load(cli.config.as_deref(), &cli.overrides).map_err(Failure::Usage))
        .and_then(|cfg| commands::run(cli.command, &cfg));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checker(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}
