//! The evaluation harness: per-device train/test scoring of every
//! predictor, validation-based best-predictor selection, the production
//! forecast path, and corpus-level aggregation (in [`report`]).
//!
//! Everything here is deterministic; devices are processed in id order and
//! may be evaluated concurrently without changing any output.

pub mod report;

pub use report::{aggregate_corpus, CorpusReport};

use crate::forecast::arima::{self, ArimaOrder, ArimaSearchConfig};
use crate::forecast::metrics::{clamp_forecast, ErrorMetrics};
use crate::forecast::trend::{self, TrendConfig};
use crate::forecast::{ar, sma, ForecastError, ForecastResult, PredictorKind};
use crate::ingest::DatasetWorkspace;
use crate::model::{
    series_median, train_test_split, DeviceCategory, DeviceModel, PatchIntervalSeries,
    SeveritySeries,
};
use crate::scoring::{
    assess_device, classify_patch_trend, classify_vulnerability_trend, combine_fdsri,
    PatchTrendCategory, RiskLevel, TrendAssessment, VulnTrendCategory,
};
use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("need at least 3 points to select a predictor, have {points}")]
    InsufficientData { points: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// Which series a forecast feeds: decides clamp bounds and categorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendDimension {
    /// Patch intervals in days; forecasts are floored at zero.
    PatchIntervals,
    /// CVSS severities; forecasts are clamped into [0, 10].
    Severities,
}

impl TrendDimension {
    fn clamp(self, fc: ForecastResult) -> ForecastResult {
        match self {
            TrendDimension::PatchIntervals => clamp_forecast(fc, 0.0, None),
            TrendDimension::Severities => clamp_forecast(fc, 0.0, Some(10.0)),
        }
    }
}

/// Harness configuration shared by evaluation and production prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Train fraction of the chronological split.
    pub split_ratio: f64,
    /// Predictors to run; order does not matter (ties always resolve in the
    /// fixed order AR, SMA, ARIMA, TREND).
    pub predictors: Vec<PredictorKind>,
    pub arima: ArimaSearchConfig,
    pub trend: TrendConfig,
    pub sma_max_window: usize,
    pub ar_max_lag: usize,
    /// Worker threads for corpus evaluation; 1 runs inline.
    pub jobs: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            split_ratio: 0.66,
            predictors: PredictorKind::ALL.to_vec(),
            arima: ArimaSearchConfig::default(),
            trend: TrendConfig::default(),
            sma_max_window: 12,
            ar_max_lag: 12,
            jobs: 1,
        }
    }
}

/// Why a trend produced no real forecast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipReason {
    /// Fewer than three observations on this dimension.
    InsufficientData { points: usize },
    /// The split ratio left nothing to test against.
    EmptyTestSlice,
}

/// One predictor's category call on one trend of one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPrediction<C> {
    pub predicted: C,
    /// Predicted category equals the category of the full observed series.
    pub correct: bool,
    /// Forecast-vs-test errors; absent exactly when the trend was skipped.
    pub metrics: Option<ErrorMetrics>,
}

/// Everything measured for one trend dimension of one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSide<C> {
    pub observed: C,
    pub skip: Option<SkipReason>,
    pub predictions: std::collections::BTreeMap<PredictorKind, TrendPrediction<C>>,
    /// Winner of the inner-validation selection; `None` when skipped.
    pub best_choice: Option<PredictorKind>,
    /// The chosen predictor's prediction (the fallback "prediction" when
    /// skipped).
    pub best: TrendPrediction<C>,
}

/// A risk-level call derived from one (PT, VT) prediction pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPrediction {
    pub predicted: RiskLevel,
    pub correct: bool,
}

/// Full evaluation record for one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceEvaluation {
    pub device_id: String,
    pub category: DeviceCategory,
    pub patch: TrendSide<PatchTrendCategory>,
    pub vuln: TrendSide<VulnTrendCategory>,
    pub observed_risk: RiskLevel,
    pub risk: std::collections::BTreeMap<PredictorKind, RiskPrediction>,
    /// Risk from the best-per-trend predictor pair.
    pub best_risk: RiskPrediction,
}

fn mean_fallback(values: &[f64], horizon: usize, kind: PredictorKind) -> ForecastResult {
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    ForecastResult::new(vec![mean; horizon], kind)
}

/// Runs one predictor over a dated training slice. Fit failures (short
/// series, degenerate dates, non-convergence) degrade to a flat mean
/// forecast instead of erroring: every device gets a prediction.
fn forecast_with(
    kind: PredictorKind,
    train: &[(NaiveDate, f64)],
    horizon_dates: &[NaiveDate],
    cfg: &EvalConfig,
) -> ForecastResult {
    let values: Vec<f64> = train.iter().map(|(_, v)| *v).collect();
    let horizon = horizon_dates.len();
    let attempt: Result<ForecastResult, ForecastError> = match kind {
        PredictorKind::Ar => {
            // A third of the series is the deepest lag worth entertaining:
            // beyond that the shared scoring window for picking the order
            // runs out of rows.
            let max_lag = cfg.ar_max_lag.min(values.len() / 3);
            ar::fit_ar(&values, max_lag).and_then(|m| ar::ar_forecast(&m, &values, horizon))
        }
        PredictorKind::Sma => {
            let window = sma::select_sma_window(&values, cfg.sma_max_window);
            sma::sma_forecast(&values, window.window, horizon)
        }
        PredictorKind::Arima => arima::select_arima_order(&values, &cfg.arima)
            .and_then(|order| arima::fit_arima(&values, order))
            .or_else(|_| arima::fit_arima(&values, ArimaOrder { p: 0, d: 0, q: 0 }))
            .and_then(|m| arima::arima_forecast(&m, &values, horizon)),
        PredictorKind::Trend => {
            trend::fit_trend_model(train, &cfg.trend, horizon_dates).map(|(_, fc)| fc)
        }
    };
    attempt.unwrap_or_else(|_| mean_fallback(&values, horizon, kind))
}

/// Median of `|forecast - observed|`: the ranking score for candidate
/// predictors. The centered deviation used for reporting ignores a constant
/// error level, which is the wrong property for model choice — a forecast
/// parked at the wrong level would rank as well as one tracking the data —
/// so ranking measures the error magnitudes themselves.
fn median_abs_error(forecast: &[f64], observed: &[f64]) -> Option<f64> {
    if forecast.len() != observed.len() || forecast.is_empty() {
        return None;
    }
    let abs: Vec<f64> = forecast
        .iter()
        .zip(observed)
        .map(|(f, o)| (f - o).abs())
        .collect();
    series_median(&abs).ok()
}

/// Picks the predictor whose clamped forecast scores the lowest median
/// absolute error on an internal 66/34 validation split of `train`. Ties
/// resolve AR before SMA before ARIMA before TREND.
pub fn select_best_predictor(
    train: &[(NaiveDate, f64)],
    dimension: TrendDimension,
    cfg: &EvalConfig,
) -> Result<PredictorKind, EvalError> {
    let Ok(split) = train_test_split(train, 0.66) else {
        return Err(EvalError::InsufficientData {
            points: train.len(),
        });
    };
    if split.test.is_empty() {
        return Err(EvalError::InsufficientData {
            points: train.len(),
        });
    }
    let val_dates: Vec<NaiveDate> = split.test.iter().map(|(d, _)| *d).collect();
    let val_obs: Vec<f64> = split.test.iter().map(|(_, v)| *v).collect();

    let mut kinds = cfg.predictors.clone();
    kinds.sort();
    kinds.dedup();

    let mut best: Option<(f64, PredictorKind)> = None;
    for kind in kinds {
        let fc = dimension.clamp(forecast_with(kind, split.train, &val_dates, cfg));
        let Some(score) = median_abs_error(&fc.values, &val_obs) else {
            continue;
        };
        if best.map_or(true, |(b, _)| score < b) {
            best = Some((score, kind));
        }
    }
    best.map(|(_, kind)| kind).ok_or(EvalError::InsufficientData {
        points: train.len(),
    })
}

fn eval_trend<C, F>(
    data: &[(NaiveDate, f64)],
    dimension: TrendDimension,
    cfg: &EvalConfig,
    classify: F,
) -> TrendSide<C>
where
    C: Copy + Eq,
    F: Fn(&[f64]) -> C,
{
    let all_values: Vec<f64> = data.iter().map(|(_, v)| *v).collect();
    let observed = classify(&all_values);

    let mut kinds = cfg.predictors.clone();
    kinds.sort();
    kinds.dedup();

    let skipped = |reason: SkipReason| {
        let fallback = TrendPrediction {
            predicted: observed,
            correct: true,
            metrics: None,
        };
        TrendSide {
            observed,
            skip: Some(reason),
            predictions: kinds.iter().map(|k| (*k, fallback.clone())).collect(),
            best_choice: None,
            best: fallback,
        }
    };

    if data.len() < 3 {
        return skipped(SkipReason::InsufficientData { points: data.len() });
    }
    let split = train_test_split(data, cfg.split_ratio)
        .expect("ratio validated by config, length checked above");
    if split.test.is_empty() {
        return skipped(SkipReason::EmptyTestSlice);
    }

    let train_values: Vec<f64> = split.train.iter().map(|(_, v)| *v).collect();
    let test_dates: Vec<NaiveDate> = split.test.iter().map(|(d, _)| *d).collect();
    let test_values: Vec<f64> = split.test.iter().map(|(_, v)| *v).collect();

    let mut predictions = std::collections::BTreeMap::new();
    for kind in &kinds {
        let fc = dimension.clamp(forecast_with(*kind, split.train, &test_dates, cfg));
        let metrics = ErrorMetrics::compute(&fc.values, &test_values)
            .expect("forecast horizon equals non-empty test length");
        let mut combined = train_values.clone();
        combined.extend_from_slice(&fc.values);
        let predicted = classify(&combined);
        predictions.insert(
            *kind,
            TrendPrediction {
                predicted,
                correct: predicted == observed,
                metrics: Some(metrics),
            },
        );
    }

    let best_choice = select_best_predictor(split.train, dimension, cfg).ok();
    let best = best_choice
        .and_then(|k| predictions.get(&k).cloned())
        .unwrap_or(TrendPrediction {
            predicted: observed,
            correct: true,
            metrics: None,
        });

    TrendSide {
        observed,
        skip: None,
        predictions,
        best_choice,
        best,
    }
}

/// Evaluates one device: chronological split on each trend, every configured
/// predictor fitted and scored, categories compared against the full
/// observed series. Insufficient data never errors — it records a skip and
/// the fallback categories.
pub fn evaluate_device(
    device: &DeviceModel,
    patches: &PatchIntervalSeries,
    severities: &SeveritySeries,
    cfg: &EvalConfig,
) -> DeviceEvaluation {
    let patch = eval_trend(
        &patches.dated_values(),
        TrendDimension::PatchIntervals,
        cfg,
        |values| classify_patch_trend(values).0,
    );
    let vuln = eval_trend(
        &severities.dated_values(),
        TrendDimension::Severities,
        cfg,
        |values| {
            classify_vulnerability_trend(values)
                .expect("series validated and forecasts clamped")
                .0
        },
    );

    let observed_risk = combine_fdsri(vuln.observed, patch.observed);
    let mut risk = std::collections::BTreeMap::new();
    for (kind, p) in &patch.predictions {
        if let Some(v) = vuln.predictions.get(kind) {
            let predicted = combine_fdsri(v.predicted, p.predicted);
            risk.insert(
                *kind,
                RiskPrediction {
                    predicted,
                    correct: predicted == observed_risk,
                },
            );
        }
    }
    let best_predicted = combine_fdsri(vuln.best.predicted, patch.best.predicted);
    let best_risk = RiskPrediction {
        predicted: best_predicted,
        correct: best_predicted == observed_risk,
    };

    DeviceEvaluation {
        device_id: device.id.clone(),
        category: device.category,
        patch,
        vuln,
        observed_risk,
        risk,
        best_risk,
    }
}

fn empty_patch(id: &str) -> PatchIntervalSeries {
    PatchIntervalSeries::new(id.to_string(), Vec::new()).expect("empty series is valid")
}

fn empty_severity(id: &str) -> SeveritySeries {
    SeveritySeries::new(id.to_string(), Vec::new()).expect("empty series is valid")
}

/// Evaluates every device in the workspace, in device-id order. With
/// `cfg.jobs > 1` devices run on a thread pool; results are merged back in
/// id order so the output is identical at any parallelism.
pub fn evaluate_corpus(ws: &DatasetWorkspace, cfg: &EvalConfig) -> Vec<DeviceEvaluation> {
    let mut devices: Vec<&DeviceModel> = ws.devices.iter().collect();
    devices.sort_by(|a, b| a.id.cmp(&b.id));

    let run = |device: &DeviceModel| {
        let patches = ws
            .patch_series(&device.id)
            .cloned()
            .unwrap_or_else(|| empty_patch(&device.id));
        let severities = ws
            .severity_series(&device.id)
            .cloned()
            .unwrap_or_else(|| empty_severity(&device.id));
        evaluate_device(device, &patches, &severities, cfg)
    };

    if cfg.jobs <= 1 {
        devices.into_iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool construction");
        pool.install(|| devices.into_par_iter().map(run).collect())
    }
}

/// Runs the production path over every device, in id order. Parallelism
/// follows `cfg.jobs` exactly like [`evaluate_corpus`].
pub fn predict_corpus(ws: &DatasetWorkspace, cfg: &EvalConfig) -> Vec<TrendAssessment> {
    let mut devices: Vec<&DeviceModel> = ws.devices.iter().collect();
    devices.sort_by(|a, b| a.id.cmp(&b.id));

    let run = |device: &DeviceModel| {
        let patches = ws
            .patch_series(&device.id)
            .cloned()
            .unwrap_or_else(|| empty_patch(&device.id));
        let severities = ws
            .severity_series(&device.id)
            .cloned()
            .unwrap_or_else(|| empty_severity(&device.id));
        predict_future(device, &patches, &severities, cfg)
    };

    if cfg.jobs <= 1 {
        devices.into_iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .expect("thread pool construction");
        pool.install(|| devices.into_par_iter().map(run).collect())
    }
}

/// Median day gap between consecutive observations, floored at one day —
/// the spacing used to place future dates for calendar-based forecasting.
fn median_spacing_days(dates: &[NaiveDate]) -> i64 {
    let gaps: Vec<f64> = dates
        .windows(2)
        .map(|w| (w[1] - w[0]).num_days() as f64)
        .collect();
    if gaps.is_empty() {
        return 1;
    }
    let median = crate::model::series_median(&gaps).expect("non-empty gaps");
    (median.round() as i64).max(1)
}

/// The production path: no holdout. The best predictor per trend (chosen by
/// inner validation) is fitted on the full history and forecasts
/// `max(1, round(0.34 n))` steps; the assessment then combines observed and
/// forecast values. Devices below three points on a dimension fall back to
/// that dimension's pessimistic category.
pub fn predict_future(
    device: &DeviceModel,
    patches: &PatchIntervalSeries,
    severities: &SeveritySeries,
    cfg: &EvalConfig,
) -> TrendAssessment {
    let _ = device; // identity travels on the series; the model is the hook
                    // for future per-category tuning
    let forecast_dimension =
        |data: &[(NaiveDate, f64)], dimension: TrendDimension| -> Option<ForecastResult> {
            if data.len() < 3 {
                return None;
            }
            let kind = select_best_predictor(data, dimension, cfg).ok()?;
            let horizon = ((0.34 * data.len() as f64).round() as usize).max(1);
            let dates: Vec<NaiveDate> = data.iter().map(|(d, _)| *d).collect();
            let spacing = median_spacing_days(&dates);
            let last = *dates.last().expect("non-empty data");
            let future_dates: Vec<NaiveDate> = (1..=horizon as i64)
                .map(|k| last + chrono::Duration::days(k * spacing))
                .collect();
            Some(dimension.clamp(forecast_with(kind, data, &future_dates, cfg)))
        };

    let patch_fc = forecast_dimension(&patches.dated_values(), TrendDimension::PatchIntervals);
    let vuln_fc = forecast_dimension(&severities.dated_values(), TrendDimension::Severities);
    assess_device(patches, severities, patch_fc.as_ref(), vuln_fc.as_ref())
}
