//! ARIMA(p, d, q) forecasting.
//!
//! The differencing depth `d` comes from repeated unit-root tests
//! ([`select_differencing`]); `(p, q)` comes from an AIC search, stepwise by
//! default ([`select_arima_order`]). Coefficients are fitted by minimizing
//! the conditional sum of squares with pre-sample innovations pinned to
//! zero, so a pure AR specification reproduces the least-squares fit of
//! [`crate::forecast::ar::fit_ar`] up to optimizer tolerance.

use crate::forecast::{adf, linalg, optim, ForecastError, ForecastResult, PredictorKind};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

/// Bounds for the order search. Defaults keep differencing shallow (`d <=
/// 2`) and explore `(p, q)` stepwise; `exhaustive` switches to scoring the
/// full grid, which is far slower at the default bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArimaSearchConfig {
    pub max_p: usize,
    pub max_q: usize,
    pub max_d: usize,
    pub exhaustive: bool,
}

impl Default for ArimaSearchConfig {
    fn default() -> Self {
        ArimaSearchConfig {
            max_p: 12,
            max_q: 12,
            max_d: 2,
            exhaustive: false,
        }
    }
}

/// A fitted ARIMA model. The intercept is only estimated for undifferenced
/// models; once `d > 0` the differenced series is treated as zero-mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: Option<f64>,
    /// Conditional sum of squared innovations at the fitted parameters.
    pub css: f64,
    pub fit_aic: f64,
}

/// Applies the first difference `d` times; the result is `d` elements
/// shorter than the input.
pub fn difference(series: &[f64], d: usize) -> Vec<f64> {
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

/// Conditional sum of squares with zero pre-sample innovations; residuals
/// start at `t = p` but only those from `sum_from` onward are accumulated,
/// letting callers score different orders on one shared row window.
/// Non-finite blow-ups (explosive MA terms) come back as +inf so the
/// optimizer steers away.
fn css_sum(w: &[f64], intercept: f64, ar: &[f64], ma: &[f64], sum_from: usize) -> f64 {
    let p = ar.len();
    let mut errs = vec![0.0; w.len()];
    let mut sum = 0.0;
    for t in p..w.len() {
        let mut pred = intercept;
        for (i, phi) in ar.iter().enumerate() {
            pred += phi * w[t - 1 - i];
        }
        for (j, theta) in ma.iter().enumerate() {
            if t > j {
                pred += theta * errs[t - 1 - j];
            }
        }
        let e = w[t] - pred;
        errs[t] = e;
        if t >= sum_from {
            sum += e * e;
        }
    }
    if sum.is_finite() {
        sum
    } else {
        f64::INFINITY
    }
}

fn css_aic(css: f64, n_resid: usize, p: usize, q: usize) -> f64 {
    n_resid as f64 * (css.max(1e-300) / n_resid as f64).ln() + 2.0 * (p + q + 1) as f64
}

/// Least-squares starting values: the intercept (when active) and AR terms
/// from an OLS regression on lagged values, MA terms at zero.
fn start_params(w: &[f64], p: usize, q: usize, intercept_active: bool) -> Vec<f64> {
    let n_cols = p + usize::from(intercept_active);
    let mut start = vec![0.0; n_cols + q];
    if n_cols > 0 {
        let rows: Vec<Vec<f64>> = (p..w.len())
            .map(|t| {
                let mut row = Vec::with_capacity(n_cols);
                if intercept_active {
                    row.push(1.0);
                }
                for lag in 1..=p {
                    row.push(w[t - lag]);
                }
                row
            })
            .collect();
        let y: Vec<f64> = w[p..].to_vec();
        if let Ok(fit) = linalg::ols(&rows, &y) {
            start[..n_cols].copy_from_slice(&fit.coef);
        } else if intercept_active {
            start[0] = w.iter().sum::<f64>() / w.len() as f64;
        }
    }
    start
}

/// Fits the given order by conditional sum of squares, minimized with
/// Nelder–Mead from least-squares starting values. Requires
/// `|train| - d >= p + q + 2`.
pub fn fit_arima(train: &[f64], order: ArimaOrder) -> Result<ArimaModel, ForecastError> {
    let ArimaOrder { p, d, q } = order;
    let w = difference(train, d.min(train.len().saturating_sub(1)));
    if train.len() <= d || w.len() < p + q + 2 {
        return Err(ForecastError::TooShort {
            len: train.len().saturating_sub(d),
            need: p + q + 2,
        });
    }
    let intercept_active = d == 0;
    let n_resid = w.len() - p;

    // Parameter vector layout: [intercept?] ++ ar[p] ++ ma[q].
    fn unpack(params: &[f64], intercept_active: bool, p: usize) -> (f64, &[f64], &[f64]) {
        if intercept_active {
            (params[0], &params[1..1 + p], &params[1 + p..])
        } else {
            (0.0, &params[..p], &params[p..])
        }
    }

    let start = start_params(&w, p, q, intercept_active);
    let (intercept, ar, ma, css) = if start.is_empty() {
        // Pure (0, d, 0) with d > 0: no free parameters at all.
        (None, Vec::new(), Vec::new(), w.iter().map(|v| v * v).sum())
    } else {
        let objective = |params: &[f64]| {
            let (c, ar, ma) = unpack(params, intercept_active, p);
            css_sum(&w, c, ar, ma, p)
        };
        let dim = start.len();
        let out = optim::minimize(objective, &start, 300 * dim + 200, 1e-9);
        if !out.converged || !out.value.is_finite() {
            return Err(ForecastError::NonConvergence);
        }
        let (c, ar, ma) = unpack(&out.x, intercept_active, p);
        let c = intercept_active.then_some(c);
        (c, ar.to_vec(), ma.to_vec(), out.value)
    };

    Ok(ArimaModel {
        order,
        ar,
        ma,
        intercept,
        css,
        fit_aic: css_aic(css, n_resid, p, q),
    })
}

/// Differencing depth: the smallest `d` whose `d`-times-differenced series
/// rejects a unit root, up to `max_d` (returned when nothing rejects). A
/// series that becomes too short to test stops the search at the current
/// depth.
pub fn select_differencing(series: &[f64], max_d: usize) -> usize {
    let mut current = series.to_vec();
    for d in 0..max_d {
        match adf::adf_test(&current) {
            Ok(out) if out.reject_unit_root => return d,
            Ok(_) => current = difference(&current, 1),
            Err(_) => return d,
        }
    }
    max_d
}

/// Fits one candidate order and scores it on the shared row window
/// `score_from..`, so orders with different AR depths compete on identical
/// samples rather than each dropping its own pre-sample rows.
fn candidate_aic(
    train: &[f64],
    w: &[f64],
    score_from: usize,
    p: usize,
    d: usize,
    q: usize,
    cache: &mut HashMap<(usize, usize), Option<f64>>,
) -> Option<f64> {
    if let Some(v) = cache.get(&(p, q)) {
        return *v;
    }
    let v = fit_arima(train, ArimaOrder { p, d, q }).ok().map(|m| {
        let css = css_sum(w, m.intercept.unwrap_or(0.0), &m.ar, &m.ma, score_from);
        css_aic(css, w.len() - score_from, p, q)
    });
    cache.insert((p, q), v);
    v
}

/// Chooses `(p, d, q)` for `train`: `d` from [`select_differencing`], then
/// `(p, q)` by AIC scored on a common row window. The search bounds are the
/// configured maxima capped at a third of the differenced length, keeping
/// every candidate honestly estimable on short series. The default stepwise
/// search seeds `(0,0)`, `(1,0)`, `(0,1)`, `(1,1)` and expands one step
/// along each axis from the incumbent until no neighbor improves; the
/// exhaustive search scores the whole grid. Candidates that fail to fit are
/// skipped; ties keep the earlier (simpler) candidate.
pub fn select_arima_order(
    train: &[f64],
    cfg: &ArimaSearchConfig,
) -> Result<ArimaOrder, ForecastError> {
    if train.len() < 10 {
        return Err(ForecastError::TooShort {
            len: train.len(),
            need: 10,
        });
    }
    let d = select_differencing(train, cfg.max_d);
    let w = difference(train, d);
    let max_p = cfg.max_p.min(w.len() / 3);
    let max_q = cfg.max_q.min(w.len() / 3);
    let score_from = max_p;

    let mut cache = HashMap::new();
    let mut best: Option<((usize, usize), f64)> = None;
    let consider = |p: usize, q: usize, best: &mut Option<((usize, usize), f64)>,
                        cache: &mut HashMap<(usize, usize), Option<f64>>| {
        if let Some(aic) = candidate_aic(train, &w, score_from, p, d, q, cache) {
            if best.map_or(true, |(_, b)| aic < b) {
                *best = Some(((p, q), aic));
            }
        }
    };

    if cfg.exhaustive {
        for p in 0..=max_p {
            for q in 0..=max_q {
                consider(p, q, &mut best, &mut cache);
            }
        }
    } else {
        for (p, q) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            if p <= max_p && q <= max_q {
                consider(p, q, &mut best, &mut cache);
            }
        }
        loop {
            let Some(((bp, bq), _)) = best else { break };
            let mut neighbors = Vec::new();
            if bp + 1 <= max_p {
                neighbors.push((bp + 1, bq));
            }
            if bp > 0 {
                neighbors.push((bp - 1, bq));
            }
            if bq + 1 <= max_q {
                neighbors.push((bp, bq + 1));
            }
            if bq > 0 {
                neighbors.push((bp, bq - 1));
            }
            for (p, q) in neighbors {
                consider(p, q, &mut best, &mut cache);
            }
            if best.map(|(k, _)| k) == Some((bp, bq)) {
                break; // no neighbor improved
            }
        }
    }

    let (p, q) = best.map(|(k, _)| k).unwrap_or((0, 0));
    Ok(ArimaOrder { p, d, q })
}

/// Undoes `d` rounds of differencing by cumulative summation anchored on the
/// training series' trailing values.
fn invert_difference(train: &[f64], diffed_forecast: &[f64], d: usize) -> Vec<f64> {
    let mut tails = Vec::with_capacity(d);
    let mut cur = train.to_vec();
    for _ in 0..d {
        tails.push(*cur.last().expect("train outlives differencing"));
        cur = difference(&cur, 1);
    }
    let mut out = diffed_forecast.to_vec();
    for level in (0..d).rev() {
        let mut last = tails[level];
        for v in &mut out {
            *v += last;
            last = *v;
        }
    }
    out
}

/// Forecasts `horizon` steps: the fitted recursion runs forward on the
/// differenced scale with future innovations at zero, then the differencing
/// is inverted against the tail of `train`. `train` must be the series the
/// model was fitted on (or at least share its last `d + p` values).
pub fn arima_forecast(
    model: &ArimaModel,
    train: &[f64],
    horizon: usize,
) -> Result<ForecastResult, ForecastError> {
    let ArimaOrder { p, d, .. } = model.order;
    if train.len() <= d {
        return Err(ForecastError::TooShort {
            len: train.len(),
            need: d + 1,
        });
    }
    let w = difference(train, d);
    if w.len() < p {
        return Err(ForecastError::TooShort {
            len: w.len(),
            need: p,
        });
    }
    let c = model.intercept.unwrap_or(0.0);

    // Reconstruct in-sample innovations, then run the recursion forward with
    // future innovations at zero.
    let mut wext = w.clone();
    let mut errs = vec![0.0; w.len()];
    for t in p..w.len() {
        let mut pred = c;
        for (i, phi) in model.ar.iter().enumerate() {
            pred += phi * wext[t - 1 - i];
        }
        for (j, theta) in model.ma.iter().enumerate() {
            if t > j {
                pred += theta * errs[t - 1 - j];
            }
        }
        errs[t] = wext[t] - pred;
    }

    let mut diffed_forecast = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let t = wext.len();
        let mut pred = c;
        for (i, phi) in model.ar.iter().enumerate() {
            pred += phi * wext[t - 1 - i];
        }
        for (j, theta) in model.ma.iter().enumerate() {
            if t > j {
                pred += theta * errs[t - 1 - j];
            }
        }
        wext.push(pred);
        errs.push(0.0);
        diffed_forecast.push(pred);
    }

    let values = invert_difference(train, &diffed_forecast, d);
    Ok(ForecastResult::new(values, PredictorKind::Arima))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::ar;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn white_noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        (0..n).map(|_| noise.sample(&mut rng)).collect()
    }

    fn random_walk(n: usize, seed: u64) -> Vec<f64> {
        let mut acc = 0.0;
        white_noise(n, seed)
            .into_iter()
            .map(|e| {
                acc += e;
                acc
            })
            .collect()
    }

    #[test]
    fn difference_shrinks_by_one_per_round() {
        assert_eq!(difference(&[1.0, 2.0, 4.0, 7.0], 1), vec![1.0, 2.0, 3.0]);
        assert_eq!(difference(&[1.0, 2.0, 4.0, 7.0], 2), vec![1.0, 1.0]);
        assert_eq!(difference(&[1.0, 2.0], 0), vec![1.0, 2.0]);
    }

    #[test]
    fn invert_difference_round_trips() {
        let series = [3.0, 5.0, 4.0, 8.0, 9.0, 12.0];
        for d in 0..3 {
            let w = difference(&series, d);
            // Treat the last two differenced points as a "forecast" made from
            // the prefix; inversion must reproduce the original tail.
            let (head, tail) = series.split_at(series.len() - 2);
            let restored = invert_difference(head, &w[w.len() - 2..], d);
            assert_relative_eq!(restored[0], tail[0], epsilon = 1e-12);
            assert_relative_eq!(restored[1], tail[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_random_walk_model_forecasts_flat() {
        // (0, 1, 0) on a ramp: differenced series has no parameters, so the
        // forecast repeats the last observed level.
        let model = fit_arima(&[1.0, 2.0, 3.0, 4.0], ArimaOrder { p: 0, d: 1, q: 0 }).unwrap();
        assert!(model.ar.is_empty() && model.ma.is_empty() && model.intercept.is_none());
        let fc = arima_forecast(&model, &[1.0, 2.0, 3.0, 4.0], 3).unwrap();
        assert_eq!(fc.values, vec![4.0, 4.0, 4.0]);
        assert_eq!(fc.model, PredictorKind::Arima);
    }

    #[test]
    fn pure_ar_spec_matches_least_squares_fit() {
        let mut y = vec![10.0, 11.0];
        let noise = white_noise(200, 11);
        for t in 2..200 {
            let e = noise[t];
            let prev = y[t - 1];
            y.push(3.0 + 0.6 * prev + e);
        }
        let ols = ar::fit_ar(&y, 1).unwrap();
        let css = fit_arima(&y, ArimaOrder { p: 1, d: 0, q: 0 }).unwrap();
        assert!(ols.lag_order() == 1);
        assert!((css.intercept.unwrap() - ols.intercept).abs() < 1e-3);
        assert!((css.ar[0] - ols.coefficients[0]).abs() < 1e-3);
    }

    #[test]
    fn recovers_ma1_coefficient() {
        let e = white_noise(400, 5);
        let y: Vec<f64> = (0..400)
            .map(|t| e[t] + if t > 0 { 0.6 * e[t - 1] } else { 0.0 })
            .collect();
        let model = fit_arima(&y, ArimaOrder { p: 0, d: 0, q: 1 }).unwrap();
        assert!((model.ma[0] - 0.6).abs() < 0.15, "theta = {}", model.ma[0]);
    }

    #[test]
    fn differencing_depth_splits_stationary_from_walks() {
        assert_eq!(select_differencing(&white_noise(200, 2), 2), 0);
        assert_eq!(select_differencing(&random_walk(200, 2), 2), 1);
    }

    #[test]
    fn constant_series_selects_and_forecasts_flat() {
        // ADF is degenerate at every depth, so d runs to the cap; the
        // all-zero differenced series then fits (0, d, 0) and the forecast
        // comes back flat at the constant.
        let train = vec![100.0; 15];
        let order = select_arima_order(&train, &ArimaSearchConfig::default()).unwrap();
        let model = fit_arima(&train, order).unwrap();
        let fc = arima_forecast(&model, &train, 5).unwrap();
        for v in fc.values {
            assert_relative_eq!(v, 100.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn stationary_series_keeps_d_zero_in_order_search() {
        let y = white_noise(120, 9);
        let order = select_arima_order(&y, &ArimaSearchConfig::default()).unwrap();
        assert_eq!(order.d, 0);
        assert!(order.p <= 2 && order.q <= 2, "order = {:?}", order);
    }

    #[test]
    fn too_short_inputs_are_rejected() {
        assert!(matches!(
            fit_arima(&[1.0, 2.0, 3.0], ArimaOrder { p: 2, d: 0, q: 2 }),
            Err(ForecastError::TooShort { .. })
        ));
        assert!(matches!(
            select_arima_order(&[1.0; 9], &ArimaSearchConfig::default()),
            Err(ForecastError::TooShort { len: 9, need: 10 })
        ));
    }
}
