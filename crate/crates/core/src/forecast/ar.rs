//! Autoregressive forecasting. Models `y_t = c + phi_1 y_{t-1} + ... +
//! phi_p y_{t-p}` are fitted by ordinary least squares; the lag order `p` is
//! chosen by AIC over `0..=max_lag`, with `p = 0` meaning an intercept-only
//! model that predicts the training mean.

use crate::forecast::linalg;
use crate::forecast::{ForecastError, ForecastResult, PredictorKind};
use serde::{Deserialize, Serialize};

/// A fitted autoregression. `coefficients[i]` multiplies the value `i + 1`
/// steps back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub fit_aic: f64,
}

impl ArModel {
    pub fn lag_order(&self) -> usize {
        self.coefficients.len()
    }

    /// Long-run mean `c / (1 - sum(phi))` of a stationary model; `None` when
    /// the coefficients sum to one.
    pub fn long_run_mean(&self) -> Option<f64> {
        let denom = 1.0 - self.coefficients.iter().sum::<f64>();
        if denom.abs() < 1e-12 {
            None
        } else {
            Some(self.intercept / denom)
        }
    }
}

/// AIC over the candidate's usable rows: `n ln(SSE / n) + 2 (p + 1)`.
fn aic(sse: f64, n_rows: usize, p: usize) -> f64 {
    n_rows as f64 * (sse.max(1e-300) / n_rows as f64).ln() + 2.0 * (p + 1) as f64
}

/// Builds the lagged design for order `p` using rows `start..n` and solves
/// it by least squares.
fn lag_regression(
    train: &[f64],
    p: usize,
    start: usize,
) -> Result<linalg::OlsFit, linalg::Singular> {
    let rows: Vec<Vec<f64>> = (start..train.len())
        .map(|t| {
            let mut row = Vec::with_capacity(p + 1);
            row.push(1.0);
            for lag in 1..=p {
                row.push(train[t - lag]);
            }
            row
        })
        .collect();
    let y: Vec<f64> = train[start..].to_vec();
    linalg::ols(&rows, &y)
}

/// Fits lag orders `0..=max_lag` and keeps the AIC minimizer.
///
/// Candidates are scored on the common rows `max_lag..n`, so their AIC
/// values differ only in fit quality and parameter count — scoring each
/// order on its own rows would hand ever-shorter samples to the larger
/// orders and let a near-interpolating fit win on vanishing error. The
/// winning order is then refitted on all of its usable rows. Candidates
/// with a singular design (constant series above `p = 0`, collinear lags)
/// are skipped, which leaves the intercept-only mean model as the natural
/// fallback. Requires `|train| >= max_lag + 2` so every candidate has more
/// rows than parameters.
pub fn fit_ar(train: &[f64], max_lag: usize) -> Result<ArModel, ForecastError> {
    let n = train.len();
    let need = (max_lag + 2).max(2);
    if n < need {
        return Err(ForecastError::TooShort { len: n, need });
    }

    let mut best: Option<(f64, usize)> = None;
    for p in 0..=max_lag {
        let Ok(fit) = lag_regression(train, p, max_lag) else {
            continue;
        };
        let candidate_aic = aic(fit.sse, fit.n_rows, p);
        if best.map_or(true, |(b, _)| candidate_aic < b) {
            best = Some((candidate_aic, p));
        }
    }
    let (_, chosen) = best.ok_or(ForecastError::SingularDesign)?;

    let fit =
        lag_regression(train, chosen, chosen).map_err(|_| ForecastError::SingularDesign)?;
    Ok(ArModel {
        intercept: fit.coef[0],
        coefficients: fit.coef[1..].to_vec(),
        fit_aic: aic(fit.sse, fit.n_rows, chosen),
    })
}

/// Iterates the fitted recursion `horizon` steps past the end of `history`,
/// feeding each forecast back in as a lagged value.
pub fn ar_forecast(
    model: &ArModel,
    history: &[f64],
    horizon: usize,
) -> Result<ForecastResult, ForecastError> {
    let p = model.lag_order();
    if history.len() < p {
        return Err(ForecastError::TooShort {
            len: history.len(),
            need: p,
        });
    }
    let mut buf = history.to_vec();
    let mut values = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut next = model.intercept;
        for (i, phi) in model.coefficients.iter().enumerate() {
            next += phi * buf[buf.len() - 1 - i];
        }
        values.push(next);
        buf.push(next);
    }
    Ok(ForecastResult::new(values, PredictorKind::Ar))
}
