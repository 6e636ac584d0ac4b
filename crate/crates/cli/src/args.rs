//! Command-line argument definitions.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdsri_core::forecast::PredictorKind;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "fdsri",
    version,
    about = "Device risk forecasting from patch and vulnerability histories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse release notes and a CVE feed into a dataset workspace.
    Ingest(IngestArgs),
    /// Evaluate every predictor on a train/test split of each device.
    Evaluate(EvaluateArgs),
    /// Forecast each device's forward patch/vulnerability trends and risk.
    Predict(PredictArgs),
    /// Print corpus statistics; optionally emit histogram CSVs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// JSON file listing the device models.
    #[arg(long)]
    pub devices: PathBuf,
    /// Normalized CVE feed (JSON array).
    #[arg(long)]
    pub feed: PathBuf,
    /// Release-note files, one per device; the file stem must be a device id.
    #[arg(long, required = true, num_args = 1..)]
    pub notes: Vec<PathBuf>,
    /// Directory the workspace is written to.
    #[arg(long)]
    pub workspace: PathBuf,
    /// Release-note grammar to parse with.
    #[arg(long, default_value = "reference")]
    pub parser: String,
}

/// Predictor selection on the command line; `all` expands to every kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictorArg {
    Ar,
    Arima,
    Sma,
    Trend,
    All,
}

/// Flags shared by `evaluate` and `predict`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Workspace directory produced by `ingest`.
    #[arg(long)]
    pub workspace: PathBuf,
    /// Comma-separated predictors to run.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub predictors: Vec<PredictorArg>,
    /// Largest autoregressive order the ARIMA search may visit.
    #[arg(long, default_value_t = 12)]
    pub max_p: usize,
    /// Largest moving-average order the ARIMA search may visit.
    #[arg(long, default_value_t = 12)]
    pub max_q: usize,
    /// Largest differencing order.
    #[arg(long, default_value_t = 2)]
    pub max_d: usize,
    /// Search the full (p, q) grid instead of the stepwise walk.
    #[arg(long)]
    pub exhaustive: bool,
    /// Worker threads for per-device work (1 = run inline).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl ModelArgs {
    /// The deduplicated predictor set, `all` expanded.
    pub fn predictor_kinds(&self) -> Vec<PredictorKind> {
        if self.predictors.iter().any(|p| *p == PredictorArg::All) {
            return PredictorKind::ALL.to_vec();
        }
        let mut kinds: Vec<PredictorKind> = self
            .predictors
            .iter()
            .map(|p| match p {
                PredictorArg::Ar => PredictorKind::Ar,
                PredictorArg::Arima => PredictorKind::Arima,
                PredictorArg::Sma => PredictorKind::Sma,
                PredictorArg::Trend => PredictorKind::Trend,
                PredictorArg::All => unreachable!("handled above"),
            })
            .collect();
        kinds.sort();
        kinds.dedup();
        kinds
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Train fraction of the chronological split, strictly between 0 and 1.
    #[arg(long, default_value_t = 0.66)]
    pub ratio: f64,
    /// Directory report.json and report.csv are written to.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Workspace directory produced by `ingest`.
    #[arg(long)]
    pub workspace: PathBuf,
    /// Also write hist_patch_intervals.csv and hist_vulns_per_device.csv.
    #[arg(long)]
    pub histograms: bool,
    /// Directory histogram CSVs are written to.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}
