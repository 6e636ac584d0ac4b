//! Univariate forecasters and the error metrics used to compare them.
//!
//! Four predictor families share the [`ForecastResult`] output shape: simple
//! moving average ([`sma`]), autoregression with automatic lag choice
//! ([`ar`]), ARIMA with unit-root-driven differencing and stepwise order
//! search ([`arima`]), and a piecewise-linear trend with L1-penalized
//! changepoints ([`trend`]). All fitting is deterministic: identical input
//! always yields identical output.

pub mod adf;
pub mod ar;
pub mod arima;
mod linalg;
pub mod metrics;
mod optim;
pub mod sma;
pub mod trend;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ForecastError {
    #[error("window {window} exceeds training length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("design matrix is singular")]
    SingularDesign,
    #[error("series of length {len} too short, need at least {need}")]
    TooShort { len: usize, need: usize },
    #[error("optimizer failed to converge")]
    NonConvergence,
    #[error("length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("dates are not strictly increasing")]
    DegenerateDates,
}

/// Which forecaster produced a result. The declaration order doubles as the
/// tie-break preference when validation scores are equal: AR wins over SMA,
/// SMA over ARIMA, ARIMA over the trend model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PredictorKind {
    #[serde(rename = "AR")]
    Ar,
    #[serde(rename = "SMA")]
    Sma,
    #[serde(rename = "ARIMA")]
    Arima,
    #[serde(rename = "TREND")]
    Trend,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 4] = [
        PredictorKind::Ar,
        PredictorKind::Sma,
        PredictorKind::Arima,
        PredictorKind::Trend,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PredictorKind::Ar => "AR",
            PredictorKind::Sma => "SMA",
            PredictorKind::Arima => "ARIMA",
            PredictorKind::Trend => "TREND",
        }
    }
}

impl std::fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A multi-step-ahead forecast plus bookkeeping about range clamping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub values: Vec<f64>,
    pub model: PredictorKind,
    /// True when [`metrics::clamp_forecast`] raised at least one value to the
    /// floor.
    pub floor_clamped: bool,
    /// True when clamping lowered at least one value to the ceiling.
    pub ceiling_clamped: bool,
}

impl ForecastResult {
    pub fn new(values: Vec<f64>, model: PredictorKind) -> Self {
        ForecastResult {
            values,
            model,
            floor_clamped: false,
            ceiling_clamped: false,
        }
    }
}
