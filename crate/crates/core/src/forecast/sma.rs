//! Simple moving average forecasting with validation-driven window choice.

use crate::forecast::metrics::mad;
use crate::forecast::{ForecastError, ForecastResult, PredictorKind};
use crate::model::train_test_split;
use serde::{Deserialize, Serialize};

/// Tuned moving-average parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmaConfig {
    pub window: usize,
}

/// Forecasts `horizon` steps as the mean of the trailing `window` values,
/// extending recursively: each forecast step joins the buffer the next mean
/// is taken over.
pub fn sma_forecast(
    train: &[f64],
    window: usize,
    horizon: usize,
) -> Result<ForecastResult, ForecastError> {
    if window == 0 || window > train.len() {
        return Err(ForecastError::WindowTooLarge {
            window,
            len: train.len(),
        });
    }
    let mut buf = train.to_vec();
    let mut values = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let tail = &buf[buf.len() - window..];
        let next = tail.iter().sum::<f64>() / window as f64;
        values.push(next);
        buf.push(next);
    }
    Ok(ForecastResult::new(values, PredictorKind::Sma))
}

/// Picks the window in `1..=min(max_window, |train| - 1)` that minimizes MAD
/// on an internal 66/34 validation split of `train`. Ties go to the smaller
/// window; series too short to validate fall back to window 1.
pub fn select_sma_window(train: &[f64], max_window: usize) -> SmaConfig {
    let fallback = SmaConfig { window: 1 };
    let Ok(split) = train_test_split(train, 0.66) else {
        return fallback;
    };
    if split.test.is_empty() {
        return fallback;
    }

    let cap = max_window.min(train.len().saturating_sub(1)).max(1);
    let mut best: Option<(f64, usize)> = None;
    for window in 1..=cap {
        if window > split.train.len() {
            break;
        }
        let Ok(fc) = sma_forecast(split.train, window, split.test.len()) else {
            continue;
        };
        let Ok(score) = mad(&fc.values, split.test) else {
            continue;
        };
        if best.map_or(true, |(b, _)| score < b) {
            best = Some((score, window));
        }
    }
    best.map_or(fallback, |(_, window)| SmaConfig { window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recursive_extension_feeds_forecasts_back() {
        // [2, 4, 6], window 2: mean(4, 6) = 5, then mean(6, 5) = 5.5.
        let fc = sma_forecast(&[2.0, 4.0, 6.0], 2, 2).unwrap();
        assert_eq!(fc.values, vec![5.0, 5.5]);
        assert_eq!(fc.model, PredictorKind::Sma);
    }

    #[test]
    fn window_equal_to_length_starts_from_full_mean() {
        let fc = sma_forecast(&[3.0, 6.0, 9.0], 3, 1).unwrap();
        assert_relative_eq!(fc.values[0], 6.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_series_forecasts_flat() {
        let train = vec![100.0; 8];
        for window in [1, 3, 8] {
            let fc = sma_forecast(&train, window, 5).unwrap();
            assert!(fc.values.iter().all(|&v| (v - 100.0).abs() < 1e-12));
        }
    }

    #[test]
    fn zero_or_oversized_window_is_rejected() {
        assert!(matches!(
            sma_forecast(&[1.0, 2.0], 0, 1),
            Err(ForecastError::WindowTooLarge { window: 0, len: 2 })
        ));
        assert!(sma_forecast(&[1.0, 2.0], 3, 1).is_err());
    }

    #[test]
    fn window_selection_matches_exhaustive_oracle() {
        // Deterministic oscillating series with drift.
        let train: Vec<f64> =
            (0..24).map(|i| 50.0 + 2.0 * i as f64 + if i % 2 == 0 { 8.0 } else { -8.0 }).collect();
        let chosen = select_sma_window(&train, 12);

        // Independent brute force over every evaluable window.
        let split_at = (0.66 * train.len() as f64).round() as usize;
        let (inner_train, inner_test) = train.split_at(split_at);
        let mut best = (f64::INFINITY, 0);
        for w in 1..=12.min(train.len() - 1) {
            if w > inner_train.len() {
                break;
            }
            let fc = sma_forecast(inner_train, w, inner_test.len()).unwrap();
            let score = mad(&fc.values, inner_test).unwrap();
            if score < best.0 {
                best = (score, w);
            }
        }
        assert_eq!(chosen.window, best.1);
    }

    #[test]
    fn short_series_fall_back_to_window_one() {
        assert_eq!(select_sma_window(&[5.0, 6.0], 12).window, 1);
        assert_eq!(select_sma_window(&[5.0], 12).window, 1);
    }
}
