//! Risk forecasting for networked devices from their patch and vulnerability
//! histories.
//!
//! The pipeline has four stages, each in its own module:
//!
//! 1. [`ingest`] — parse vendor release notes and a CVE feed into per-device
//!    histories of patch intervals and CVSS severities, persisted as a small
//!    on-disk workspace.
//! 2. [`forecast`] — univariate forecasters (moving average, autoregression,
//!    ARIMA with automatic order selection, piecewise-linear trend) plus the
//!    error metrics used to compare them.
//! 3. [`scoring`] — categorize forecast patch intervals and severities into
//!    patch/vulnerability trends and combine them into a four-level risk
//!    rating (FDSRI).
//! 4. [`eval`] — the train/test harness that measures per-predictor category
//!    accuracy across a device corpus and aggregates the results into a
//!    report.
//!
//! [`model`] holds the shared domain types, and [`summary`] computes corpus
//! descriptive statistics (distribution summaries and histograms).

pub mod eval;
pub mod forecast;
pub mod ingest;
pub mod model;
pub mod scoring;
pub mod summary;
