//! `fdsri` — ingest device patch/vulnerability histories, evaluate the
//! forecasting pipeline, and score forward risk.
//!
//! Exit codes: 0 success, 1 internal fault, 2 bad input or usage.

mod args;
mod commands;

use args::{Cli, Command};
use clap::Parser;
use fdsri_core::ingest::IngestError;
use std::process::ExitCode;

/// Failures split by who has to act: fix the input (exit 2) or report a bug
/// (exit 1).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn input(msg: impl Into<String>) -> CliError {
        CliError::Input(msg.into())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> CliError {
        // Everything ingestion rejects traces back to the files it was
        // pointed at.
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(args) => commands::ingest(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Predict(args) => commands::predict(args),
        Command::Report(args) => commands::report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
