//! Forecast error metrics and range clamping.

use crate::forecast::{ForecastError, ForecastResult};
use crate::model::series_median;
use serde::{Deserialize, Serialize};

/// RMSE/MAD pair for one forecast against its observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub rmse: f64,
    pub mad: f64,
}

impl ErrorMetrics {
    pub fn compute(forecast: &[f64], observed: &[f64]) -> Result<Self, ForecastError> {
        Ok(ErrorMetrics {
            rmse: rmse(forecast, observed)?,
            mad: mad(forecast, observed)?,
        })
    }
}

fn residuals(forecast: &[f64], observed: &[f64]) -> Result<Vec<f64>, ForecastError> {
    if forecast.len() != observed.len() || forecast.is_empty() {
        return Err(ForecastError::LengthMismatch {
            a: forecast.len(),
            b: observed.len(),
        });
    }
    Ok(forecast.iter().zip(observed).map(|(f, o)| f - o).collect())
}

/// Root mean squared error: `sqrt(mean((forecast - observed)^2))`.
pub fn rmse(forecast: &[f64], observed: &[f64]) -> Result<f64, ForecastError> {
    let e = residuals(forecast, observed)?;
    let mean_sq = e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64;
    Ok(mean_sq.sqrt())
}

/// Median absolute deviation of the residuals: the median of
/// `|e_i - median(e)|` where `e = forecast - observed`. Robust to a single
/// wild forecast step in a way RMSE is not.
pub fn mad(forecast: &[f64], observed: &[f64]) -> Result<f64, ForecastError> {
    let e = residuals(forecast, observed)?;
    let center = series_median(&e).expect("residuals are non-empty");
    let abs_dev: Vec<f64> = e.iter().map(|x| (x - center).abs()).collect();
    Ok(series_median(&abs_dev).expect("residuals are non-empty"))
}

/// Clips forecast values into `[floor, ceiling]`, recording on the result
/// which side (if any) was applied. Values already in range pass through
/// bit-identical.
pub fn clamp_forecast(
    mut result: ForecastResult,
    floor: f64,
    ceiling: Option<f64>,
) -> ForecastResult {
    for v in &mut result.values {
        if *v < floor {
            *v = floor;
            result.floor_clamped = true;
        } else if let Some(c) = ceiling {
            if *v > c {
                *v = c;
                result.ceiling_clamped = true;
            }
        }
    }
    result
}
