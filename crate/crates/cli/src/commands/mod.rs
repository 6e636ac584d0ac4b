//! Subcommand implementations.

mod evaluate;
mod ingest;
mod predict;
mod report;

pub use evaluate::run as evaluate;
pub use ingest::run as ingest;
pub use predict::run as predict;
pub use report::run as report;

use crate::args::ModelArgs;
use crate::CliError;
use fdsri_core::eval::EvalConfig;
use fdsri_core::forecast::arima::ArimaSearchConfig;

/// Translates shared model flags into the harness configuration.
pub fn eval_config(args: &ModelArgs, split_ratio: f64) -> Result<EvalConfig, CliError> {
    if !(split_ratio > 0.0 && split_ratio < 1.0) {
        return Err(CliError::input(format!(
            "--ratio must be strictly between 0 and 1, got {split_ratio}"
        )));
    }
    if args.jobs < 1 {
        return Err(CliError::input("--jobs must be at least 1"));
    }
    Ok(EvalConfig {
        split_ratio,
        predictors: args.predictor_kinds(),
        arima: ArimaSearchConfig {
            max_p: args.max_p,
            max_q: args.max_q,
            max_d: args.max_d,
            exhaustive: args.exhaustive,
        },
        jobs: args.jobs,
        ..EvalConfig::default()
    })
}
