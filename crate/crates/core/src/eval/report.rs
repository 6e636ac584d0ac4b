//! Corpus-level aggregation of device evaluations and the serialized
//! report formats (JSON, CSV, and a plain-text summary table).
//!
//! Accuracy is reported against two denominators: devices where the trend
//! could actually be forecast ("evaluable"), and all devices, where skipped
//! devices count as correct because the fallback category is the one the
//! scorer would assign anyway.

use super::{DeviceEvaluation, EvalError, SkipReason};
use crate::forecast::PredictorKind;
use crate::model::DeviceCategory;
use crate::scoring::{PatchTrendCategory, RiskLevel, VulnTrendCategory};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Accuracy within one observed category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub devices: usize,
    pub correct: usize,
    /// Percent correct; `None` when no device falls in this class.
    pub pct: Option<f64>,
}

/// Category-prediction accuracy for one predictor on one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyStats {
    /// Devices with a real forecast on this dimension.
    pub evaluable: usize,
    pub correct_evaluable: usize,
    /// All devices, skipped ones included (skips count as correct).
    pub total: usize,
    pub correct_total: usize,
    pub pct_evaluable: Option<f64>,
    pub pct_total: f64,
    /// Wrong calls rated above the observed category (for patch trends:
    /// predicted faster than observed).
    pub too_high: usize,
    pub too_low: usize,
    /// Evaluable-only accuracy broken down by the observed category.
    pub by_observed_class: BTreeMap<String, ClassAccuracy>,
}

/// Forecast error summary for one predictor on one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub devices: usize,
    pub median_rmse: Option<f64>,
    pub median_mad: Option<f64>,
}

/// Everything aggregated for one predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorReport {
    pub patch_errors: ErrorSummary,
    pub vuln_errors: ErrorSummary,
    pub patch_accuracy: AccuracyStats,
    pub vuln_accuracy: AccuracyStats,
    pub risk_accuracy: AccuracyStats,
}

/// The whole-corpus evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub total_devices: usize,
    pub devices_per_category: BTreeMap<DeviceCategory, usize>,
    pub split_ratio: f64,
    pub per_predictor: BTreeMap<PredictorKind, PredictorReport>,
    /// The validation-selected best predictor per device and trend.
    pub best_path: PredictorReport,
    /// How often each predictor won the patch-trend selection.
    pub patch_selection: BTreeMap<PredictorKind, usize>,
    pub vuln_selection: BTreeMap<PredictorKind, usize>,
    /// Best-path risk accuracy split by device category.
    pub risk_by_device_category: BTreeMap<DeviceCategory, ClassAccuracy>,
}

fn pct(correct: usize, total: usize) -> Option<f64> {
    if total == 0 {
        None
    } else {
        Some(100.0 * correct as f64 / total as f64)
    }
}

fn median_of(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite metrics"));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// One device's contribution to a dimension's accuracy numbers.
struct Call {
    observed_rank: u8,
    predicted_rank: u8,
    observed_name: &'static str,
    correct: bool,
    skipped: bool,
}

fn accuracy_stats(calls: &[Call]) -> AccuracyStats {
    let total = calls.len();
    let correct_total = calls.iter().filter(|c| c.correct).count();
    let evaluable: Vec<&Call> = calls.iter().filter(|c| !c.skipped).collect();
    let correct_evaluable = evaluable.iter().filter(|c| c.correct).count();
    let too_high = evaluable
        .iter()
        .filter(|c| c.predicted_rank > c.observed_rank)
        .count();
    let too_low = evaluable
        .iter()
        .filter(|c| c.predicted_rank < c.observed_rank)
        .count();

    let mut by_observed_class: BTreeMap<String, ClassAccuracy> = BTreeMap::new();
    for call in &evaluable {
        let entry = by_observed_class
            .entry(call.observed_name.to_string())
            .or_insert(ClassAccuracy {
                devices: 0,
                correct: 0,
                pct: None,
            });
        entry.devices += 1;
        if call.correct {
            entry.correct += 1;
        }
    }
    for entry in by_observed_class.values_mut() {
        entry.pct = pct(entry.correct, entry.devices);
    }

    AccuracyStats {
        evaluable: evaluable.len(),
        correct_evaluable,
        total,
        correct_total,
        pct_evaluable: pct(correct_evaluable, evaluable.len()),
        pct_total: pct(correct_total, total).unwrap_or(100.0),
        too_high,
        too_low,
        by_observed_class,
    }
}

/// Extracts the per-device calls for one predictor (or `None` = best path)
/// on the patch dimension.
fn patch_calls(evals: &[DeviceEvaluation], kind: Option<PredictorKind>) -> Vec<Call> {
    evals
        .iter()
        .map(|e| {
            let (predicted, correct) = match kind {
                Some(k) => {
                    let p = &e.patch.predictions[&k];
                    (p.predicted, p.correct)
                }
                None => (e.patch.best.predicted, e.patch.best.correct),
            };
            Call {
                // A higher speed rank means a faster patch cadence, so
                // "too high" reads as "predicted faster than observed".
                observed_rank: e.patch.observed.speed_rank(),
                predicted_rank: predicted.speed_rank(),
                observed_name: e.patch.observed.as_str(),
                correct,
                skipped: e.patch.skip.is_some(),
            }
        })
        .collect()
}

fn vuln_calls(evals: &[DeviceEvaluation], kind: Option<PredictorKind>) -> Vec<Call> {
    evals
        .iter()
        .map(|e| {
            let (predicted, correct) = match kind {
                Some(k) => {
                    let v = &e.vuln.predictions[&k];
                    (v.predicted, v.correct)
                }
                None => (e.vuln.best.predicted, e.vuln.best.correct),
            };
            Call {
                observed_rank: e.vuln.observed.severity_rank(),
                predicted_rank: predicted.severity_rank(),
                observed_name: e.vuln.observed.as_str(),
                correct,
                skipped: e.vuln.skip.is_some(),
            }
        })
        .collect()
}

fn risk_calls(evals: &[DeviceEvaluation], kind: Option<PredictorKind>) -> Vec<Call> {
    evals
        .iter()
        .map(|e| {
            let (predicted, correct) = match kind {
                Some(k) => {
                    let r = &e.risk[&k];
                    (r.predicted, r.correct)
                }
                None => (e.best_risk.predicted, e.best_risk.correct),
            };
            Call {
                observed_rank: e.observed_risk as u8,
                predicted_rank: predicted as u8,
                observed_name: e.observed_risk.as_str(),
                correct,
                // Risk is evaluable when at least one trend produced a real
                // forecast; with both trends skipped it is pure fallback.
                skipped: e.patch.skip.is_some() && e.vuln.skip.is_some(),
            }
        })
        .collect()
}

fn error_summary(
    evals: &[DeviceEvaluation],
    kind: Option<PredictorKind>,
    patch_side: bool,
) -> ErrorSummary {
    let mut rmses = Vec::new();
    let mut mads = Vec::new();
    for e in evals {
        let metrics = if patch_side {
            match kind {
                Some(k) => e.patch.predictions[&k].metrics,
                None => e.patch.best.metrics,
            }
        } else {
            match kind {
                Some(k) => e.vuln.predictions[&k].metrics,
                None => e.vuln.best.metrics,
            }
        };
        if let Some(m) = metrics {
            rmses.push(m.rmse);
            mads.push(m.mad);
        }
    }
    ErrorSummary {
        devices: rmses.len(),
        median_rmse: median_of(rmses),
        median_mad: median_of(mads),
    }
}

fn predictor_report(evals: &[DeviceEvaluation], kind: Option<PredictorKind>) -> PredictorReport {
    PredictorReport {
        patch_errors: error_summary(evals, kind, true),
        vuln_errors: error_summary(evals, kind, false),
        patch_accuracy: accuracy_stats(&patch_calls(evals, kind)),
        vuln_accuracy: accuracy_stats(&vuln_calls(evals, kind)),
        risk_accuracy: accuracy_stats(&risk_calls(evals, kind)),
    }
}

/// Rolls per-device evaluations up into the corpus report.
pub fn aggregate_corpus(evals: &[DeviceEvaluation], split_ratio: f64) -> Result<CorpusReport, EvalError> {
    if evals.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }

    let mut devices_per_category: BTreeMap<DeviceCategory, usize> = BTreeMap::new();
    for e in evals {
        *devices_per_category.entry(e.category).or_insert(0) += 1;
    }

    let kinds: Vec<PredictorKind> = evals[0].patch.predictions.keys().copied().collect();
    let per_predictor: BTreeMap<PredictorKind, PredictorReport> = kinds
        .iter()
        .map(|&k| (k, predictor_report(evals, Some(k))))
        .collect();

    let mut patch_selection: BTreeMap<PredictorKind, usize> = BTreeMap::new();
    let mut vuln_selection: BTreeMap<PredictorKind, usize> = BTreeMap::new();
    for e in evals {
        if let Some(k) = e.patch.best_choice {
            *patch_selection.entry(k).or_insert(0) += 1;
        }
        if let Some(k) = e.vuln.best_choice {
            *vuln_selection.entry(k).or_insert(0) += 1;
        }
    }

    let mut risk_by_device_category: BTreeMap<DeviceCategory, ClassAccuracy> = BTreeMap::new();
    for e in evals {
        let entry = risk_by_device_category
            .entry(e.category)
            .or_insert(ClassAccuracy {
                devices: 0,
                correct: 0,
                pct: None,
            });
        entry.devices += 1;
        if e.best_risk.correct {
            entry.correct += 1;
        }
    }
    for entry in risk_by_device_category.values_mut() {
        entry.pct = pct(entry.correct, entry.devices);
    }

    Ok(CorpusReport {
        total_devices: evals.len(),
        devices_per_category,
        split_ratio,
        per_predictor,
        best_path: predictor_report(evals, None),
        patch_selection,
        vuln_selection,
        risk_by_device_category,
    })
}

/// Writes the report as pretty-printed JSON with a trailing newline.
/// Identical reports produce byte-identical files.
pub fn write_report_json(report: &CorpusReport, path: &Path) -> std::io::Result<()> {
    let mut body = serde_json::to_string_pretty(report).expect("report serializes");
    body.push('\n');
    std::fs::write(path, body)
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.4}"),
        None => String::new(),
    }
}

fn fmt_pct(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.1}"),
        None => String::new(),
    }
}

fn push_accuracy_section<W: Write>(
    out: &mut W,
    title: &str,
    classes: &[&str],
    rows: &[(String, &AccuracyStats)],
) -> std::io::Result<()> {
    writeln!(out, "# {title}")?;
    write!(out, "predictor,evaluable,correct,pct_evaluable,total,correct_total,pct_total,too_high,too_low")?;
    for class in classes {
        write!(out, ",pct_{}", class.to_lowercase())?;
    }
    writeln!(out)?;
    for (name, stats) in rows {
        write!(
            out,
            "{name},{},{},{},{},{},{:.1},{},{}",
            stats.evaluable,
            stats.correct_evaluable,
            fmt_pct(stats.pct_evaluable),
            stats.total,
            stats.correct_total,
            stats.pct_total,
            stats.too_high,
            stats.too_low,
        )?;
        for class in classes {
            let cell = stats
                .by_observed_class
                .get(*class)
                .map(|c| fmt_pct(c.pct))
                .unwrap_or_default();
            write!(out, ",{cell}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes the report as a multi-section CSV: forecast errors per predictor,
/// accuracy tables per dimension, and device-category coverage. Section
/// titles start with `#`.
pub fn write_report_csv(report: &CorpusReport, path: &Path) -> std::io::Result<()> {
    let mut out: Vec<u8> = Vec::new();

    writeln!(out, "# corpus")?;
    writeln!(out, "total_devices,split_ratio")?;
    writeln!(out, "{},{}", report.total_devices, report.split_ratio)?;

    writeln!(out, "# devices per category")?;
    writeln!(out, "category,devices")?;
    for (category, count) in &report.devices_per_category {
        writeln!(out, "{category},{count}")?;
    }

    writeln!(out, "# forecast errors")?;
    writeln!(
        out,
        "predictor,patch_devices,patch_median_rmse,patch_median_mad,vuln_devices,vuln_median_rmse,vuln_median_mad"
    )?;
    let mut error_rows: Vec<(String, &PredictorReport)> = report
        .per_predictor
        .iter()
        .map(|(k, r)| (k.to_string(), r))
        .collect();
    error_rows.push(("BEST".to_string(), &report.best_path));
    for (name, r) in &error_rows {
        writeln!(
            out,
            "{name},{},{},{},{},{},{}",
            r.patch_errors.devices,
            fmt_opt(r.patch_errors.median_rmse),
            fmt_opt(r.patch_errors.median_mad),
            r.vuln_errors.devices,
            fmt_opt(r.vuln_errors.median_rmse),
            fmt_opt(r.vuln_errors.median_mad),
        )?;
    }

    let patch_classes: Vec<&str> = PatchTrendCategory::ALL.iter().map(|c| c.as_str()).collect();
    let vuln_classes: Vec<&str> = VulnTrendCategory::ALL.iter().map(|c| c.as_str()).collect();
    let risk_classes: Vec<&str> = RiskLevel::ALL.iter().map(|c| c.as_str()).collect();

    let patch_rows: Vec<(String, &AccuracyStats)> = error_rows
        .iter()
        .map(|(name, r)| (name.clone(), &r.patch_accuracy))
        .collect();
    push_accuracy_section(&mut out, "patch trend accuracy", &patch_classes, &patch_rows)?;

    let vuln_rows: Vec<(String, &AccuracyStats)> = error_rows
        .iter()
        .map(|(name, r)| (name.clone(), &r.vuln_accuracy))
        .collect();
    push_accuracy_section(&mut out, "vulnerability trend accuracy", &vuln_classes, &vuln_rows)?;

    let risk_rows: Vec<(String, &AccuracyStats)> = error_rows
        .iter()
        .map(|(name, r)| (name.clone(), &r.risk_accuracy))
        .collect();
    push_accuracy_section(&mut out, "risk accuracy", &risk_classes, &risk_rows)?;

    writeln!(out, "# predictor selection")?;
    writeln!(out, "predictor,patch_wins,vuln_wins")?;
    let mut all_kinds: Vec<PredictorKind> = report.per_predictor.keys().copied().collect();
    all_kinds.sort();
    for kind in all_kinds {
        writeln!(
            out,
            "{kind},{},{}",
            report.patch_selection.get(&kind).copied().unwrap_or(0),
            report.vuln_selection.get(&kind).copied().unwrap_or(0),
        )?;
    }

    writeln!(out, "# risk accuracy by device category")?;
    writeln!(out, "category,devices,correct,pct")?;
    for (category, acc) in &report.risk_by_device_category {
        writeln!(
            out,
            "{category},{},{},{}",
            acc.devices,
            acc.correct,
            fmt_pct(acc.pct)
        )?;
    }

    std::fs::write(path, out)
}

/// Renders the human-readable summary table printed after an evaluation.
pub fn render_summary(report: &CorpusReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "evaluated {} devices (train fraction {})\n\n",
        report.total_devices, report.split_ratio
    ));
    out.push_str(&format!(
        "{:<10} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
        "predictor", "patch acc %", "vuln acc %", "risk acc %", "patch rmse", "vuln rmse"
    ));
    let mut rows: Vec<(String, &PredictorReport)> = report
        .per_predictor
        .iter()
        .map(|(k, r)| (k.to_string(), r))
        .collect();
    rows.push(("BEST".to_string(), &report.best_path));
    for (name, r) in rows {
        out.push_str(&format!(
            "{:<10} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
            name,
            fmt_pct(r.patch_accuracy.pct_evaluable),
            fmt_pct(r.vuln_accuracy.pct_evaluable),
            fmt_pct(r.risk_accuracy.pct_evaluable),
            fmt_opt(r.patch_errors.median_rmse),
            fmt_opt(r.vuln_errors.median_rmse),
        ));
    }
    out.push_str(&format!(
        "\nall-device risk accuracy (best path): {:.1}%\n",
        report.best_path.risk_accuracy.pct_total
    ));
    out
}

/// Count of devices skipped on a trend, for operator-facing summaries.
pub fn count_skips(evals: &[DeviceEvaluation]) -> (usize, usize) {
    let patch = evals
        .iter()
        .filter(|e| matches!(e.patch.skip, Some(SkipReason::InsufficientData { .. }) | Some(SkipReason::EmptyTestSlice)))
        .count();
    let vuln = evals.iter().filter(|e| e.vuln.skip.is_some()).count();
    (patch, vuln)
}
