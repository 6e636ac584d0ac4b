//! Trend categorization and FDSRI risk scoring.
//!
//! Patch intervals and CVSS severities are summarized by their median and
//! bucketed into three categories each; the two categories combine through a
//! fixed 3x3 matrix into the four-level FDSRI risk rating. Devices with
//! fewer than two observations on a dimension fall back to that dimension's
//! most pessimistic category.

use crate::forecast::ForecastResult;
use crate::model::{series_median, PatchIntervalSeries, SeveritySeries};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("severity value {0} outside [0, 10]")]
    OutOfRange(f64),
}

/// How quickly a device gets patched, by median interval in days: Fast is
/// 0-22, Medium 23-413, Slow 414 and up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatchTrendCategory {
    Fast,
    Medium,
    Slow,
}

impl PatchTrendCategory {
    /// All categories, fastest first — the order reports list them in.
    pub const ALL: [PatchTrendCategory; 3] = [
        PatchTrendCategory::Fast,
        PatchTrendCategory::Medium,
        PatchTrendCategory::Slow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatchTrendCategory::Fast => "Fast",
            PatchTrendCategory::Medium => "Medium",
            PatchTrendCategory::Slow => "Slow",
        }
    }

    /// Rank with Fast highest: a predicted category "too high" means the
    /// device was predicted to patch faster than it actually does.
    pub fn speed_rank(self) -> u8 {
        match self {
            PatchTrendCategory::Fast => 2,
            PatchTrendCategory::Medium => 1,
            PatchTrendCategory::Slow => 0,
        }
    }
}

impl std::fmt::Display for PatchTrendCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Severity band of the device's median CVSS score: Low is 0.0-3.9, Medium
/// 4.0-6.9, High 7.0-10.0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VulnTrendCategory {
    Low,
    Medium,
    High,
}

impl VulnTrendCategory {
    /// All categories, least severe first.
    pub const ALL: [VulnTrendCategory; 3] = [
        VulnTrendCategory::Low,
        VulnTrendCategory::Medium,
        VulnTrendCategory::High,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VulnTrendCategory::Low => "Low",
            VulnTrendCategory::Medium => "Medium",
            VulnTrendCategory::High => "High",
        }
    }

    pub fn severity_rank(self) -> u8 {
        match self {
            VulnTrendCategory::Low => 0,
            VulnTrendCategory::Medium => 1,
            VulnTrendCategory::High => 2,
        }
    }
}

impl std::fmt::Display for VulnTrendCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Four-level FDSRI rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RiskLevel {
    Low,
    Medium,
    High,
    Critical,
}

impl RiskLevel {
    /// All levels, least severe first.
    pub const ALL: [RiskLevel; 4] = [
        RiskLevel::Low,
        RiskLevel::Medium,
        RiskLevel::High,
        RiskLevel::Critical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RiskLevel::Low => "Low",
            RiskLevel::Medium => "Medium",
            RiskLevel::High => "High",
            RiskLevel::Critical => "Critical",
        }
    }
}

impl std::fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Buckets a median patch interval in days.
fn patch_category_of_median(median_days: f64) -> PatchTrendCategory {
    // Boundaries sit between integer day counts: anything under 22.5 rounds
    // into the 0-22 band, under 413.5 into 23-413, the rest is Slow.
    let rounded = median_days.round();
    if rounded <= 22.0 {
        PatchTrendCategory::Fast
    } else if rounded <= 413.0 {
        PatchTrendCategory::Medium
    } else {
        PatchTrendCategory::Slow
    }
}

/// Buckets a median CVSS score, comparing at one-decimal resolution so 3.94
/// stays Low while 3.95 rounds up to the 4.0 boundary.
fn vuln_category_of_median(median_cvss: f64) -> Result<VulnTrendCategory, ScoringError> {
    if !(0.0..=10.0).contains(&median_cvss) {
        return Err(ScoringError::OutOfRange(median_cvss));
    }
    let tenths = (median_cvss * 10.0).round() as i64;
    Ok(if tenths <= 39 {
        VulnTrendCategory::Low
    } else if tenths <= 69 {
        VulnTrendCategory::Medium
    } else {
        VulnTrendCategory::High
    })
}

/// Patch trend of an interval list: the category of the median, or the Slow
/// fallback (with no basis value) below two observations.
pub fn classify_patch_trend(intervals: &[f64]) -> (PatchTrendCategory, Option<f64>) {
    if intervals.len() < 2 {
        return (PatchTrendCategory::Slow, None);
    }
    let median = series_median(intervals).expect("at least two values");
    (patch_category_of_median(median), Some(median))
}

/// Vulnerability trend of a severity list: the category of the median, or
/// the Low fallback below two observations. Errors only when a value
/// escapes [0, 10], which validated series and clamped forecasts cannot.
pub fn classify_vulnerability_trend(
    severities: &[f64],
) -> Result<(VulnTrendCategory, Option<f64>), ScoringError> {
    if severities.len() < 2 {
        return Ok((VulnTrendCategory::Low, None));
    }
    if let Some(&bad) = severities.iter().find(|v| !(0.0..=10.0).contains(*v)) {
        return Err(ScoringError::OutOfRange(bad));
    }
    let median = series_median(severities).expect("at least two values");
    Ok((vuln_category_of_median(median)?, Some(median)))
}

/// The FDSRI matrix: vulnerability severity crossed with patching speed.
pub fn combine_fdsri(vt: VulnTrendCategory, pt: PatchTrendCategory) -> RiskLevel {
    use PatchTrendCategory as P;
    use VulnTrendCategory as V;
    match (vt, pt) {
        (V::Low, P::Fast) => RiskLevel::Low,
        (V::Low, P::Medium) => RiskLevel::Low,
        (V::Low, P::Slow) => RiskLevel::Medium,
        (V::Medium, P::Fast) => RiskLevel::Low,
        (V::Medium, P::Medium) => RiskLevel::Medium,
        (V::Medium, P::Slow) => RiskLevel::High,
        (V::High, P::Fast) => RiskLevel::Medium,
        (V::High, P::Medium) => RiskLevel::High,
        (V::High, P::Slow) => RiskLevel::Critical,
    }
}

/// A device's scored outlook: both trends plus the combined risk level,
/// with the medians they rest on (`None` when a fallback fired).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendAssessment {
    pub device_id: String,
    pub patch_trend: PatchTrendCategory,
    pub vuln_trend: VulnTrendCategory,
    pub risk: RiskLevel,
    pub patch_median: Option<f64>,
    pub vuln_median: Option<f64>,
}

impl TrendAssessment {
    pub fn patch_fallback(&self) -> bool {
        self.patch_median.is_none()
    }

    pub fn vuln_fallback(&self) -> bool {
        self.vuln_median.is_none()
    }
}

/// Scores a device from its observed history plus optional forecasts; the
/// forecast values (already clamped into range by the caller) extend the
/// histories before the medians are taken. Out-of-range forecast values are
/// clipped rather than rejected, so the function is total.
pub fn assess_device(
    patches: &PatchIntervalSeries,
    severities: &SeveritySeries,
    patch_forecast: Option<&ForecastResult>,
    vuln_forecast: Option<&ForecastResult>,
) -> TrendAssessment {
    let mut intervals = patches.values();
    if let Some(fc) = patch_forecast {
        intervals.extend(fc.values.iter().map(|v| v.max(0.0)));
    }
    let mut cvss = severities.values();
    if let Some(fc) = vuln_forecast {
        cvss.extend(fc.values.iter().map(|v| v.clamp(0.0, 10.0)));
    }

    let (patch_trend, patch_median) = classify_patch_trend(&intervals);
    let (vuln_trend, vuln_median) =
        classify_vulnerability_trend(&cvss).expect("values clipped into range above");
    TrendAssessment {
        device_id: patches.device_id.clone(),
        patch_trend,
        vuln_trend,
        risk: combine_fdsri(vuln_trend, patch_trend),
        patch_median,
        vuln_median,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::{ForecastResult, PredictorKind};
    use crate::model::{PatchPoint, SeverityPoint};
    use chrono::NaiveDate;

    #[test]
    fn fdsri_matrix_is_exact() {
        use PatchTrendCategory::*;
        use RiskLevel as R;
        use VulnTrendCategory as V;
        let expect = [
            (V::Low, Fast, R::Low),
            (V::Low, Medium, R::Low),
            (V::Low, Slow, R::Medium),
            (V::Medium, Fast, R::Low),
            (V::Medium, Medium, R::Medium),
            (V::Medium, Slow, R::High),
            (V::High, Fast, R::Medium),
            (V::High, Medium, R::High),
            (V::High, Slow, R::Critical),
        ];
        for (vt, pt, risk) in expect {
            assert_eq!(combine_fdsri(vt, pt), risk, "({vt:?}, {pt:?})");
        }
    }

    #[test]
    fn patch_trend_boundaries() {
        let cases = [
            (0.0, PatchTrendCategory::Fast),
            (22.0, PatchTrendCategory::Fast),
            (22.4, PatchTrendCategory::Fast),
            (22.5, PatchTrendCategory::Medium), // rounds to 23 (half away from zero)
            (23.0, PatchTrendCategory::Medium),
            (413.0, PatchTrendCategory::Medium),
            (413.4, PatchTrendCategory::Medium),
            (413.5, PatchTrendCategory::Slow),
            (414.0, PatchTrendCategory::Slow),
            (6017.0, PatchTrendCategory::Slow),
        ];
        for (median, want) in cases {
            let (got, basis) = classify_patch_trend(&[median, median]);
            assert_eq!(got, want, "median {median}");
            assert_eq!(basis, Some(median));
        }
    }

    #[test]
    fn vuln_trend_boundaries() {
        let cases = [
            (0.0, VulnTrendCategory::Low),
            (3.9, VulnTrendCategory::Low),
            (3.94, VulnTrendCategory::Low),
            (3.95, VulnTrendCategory::Medium), // one-decimal rounding hits 4.0
            (4.0, VulnTrendCategory::Medium),
            (6.9, VulnTrendCategory::Medium),
            (6.94, VulnTrendCategory::Medium),
            (6.95, VulnTrendCategory::High),
            (7.0, VulnTrendCategory::High),
            (10.0, VulnTrendCategory::High),
        ];
        for (median, want) in cases {
            let (got, _) = classify_vulnerability_trend(&[median, median]).unwrap();
            assert_eq!(got, want, "median {median}");
        }
    }

    #[test]
    fn fallbacks_fire_below_two_points() {
        assert_eq!(classify_patch_trend(&[5.0]), (PatchTrendCategory::Slow, None));
        assert_eq!(classify_patch_trend(&[]), (PatchTrendCategory::Slow, None));
        assert_eq!(
            classify_vulnerability_trend(&[9.9]).unwrap(),
            (VulnTrendCategory::Low, None)
        );
    }

    #[test]
    fn out_of_range_severity_is_rejected() {
        assert_eq!(
            classify_vulnerability_trend(&[5.0, 10.5]).unwrap_err(),
            ScoringError::OutOfRange(10.5)
        );
    }

    fn day(i: u64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(i)
    }

    #[test]
    fn assessment_merges_history_with_forecasts() {
        // Intervals [500, 600] + forecast [10, 10, 10, 10, 10]: the median
        // drops to 10, so the patch trend comes out Fast.
        let patches = PatchIntervalSeries::new(
            "dev".into(),
            vec![
                PatchPoint { date: day(0), interval_days: 500 },
                PatchPoint { date: day(30), interval_days: 600 },
            ],
        )
        .unwrap();
        let severities = SeveritySeries::new(
            "dev".into(),
            vec![
                SeverityPoint { date: day(0), cvss: 2.0 },
                SeverityPoint { date: day(30), cvss: 2.2 },
            ],
        )
        .unwrap();
        let fc = ForecastResult::new(vec![10.0; 5], PredictorKind::Ar);
        let a = assess_device(&patches, &severities, Some(&fc), None);
        assert_eq!(a.patch_trend, PatchTrendCategory::Fast);
        assert_eq!(a.patch_median, Some(10.0));
        assert_eq!(a.vuln_trend, VulnTrendCategory::Low);
        assert_eq!(a.risk, RiskLevel::Low);
        assert!(!a.patch_fallback());
    }

    #[test]
    fn assessment_of_empty_histories_uses_fallbacks() {
        let patches = PatchIntervalSeries::new("dev".into(), vec![]).unwrap();
        let severities = SeveritySeries::new("dev".into(), vec![]).unwrap();
        let a = assess_device(&patches, &severities, None, None);
        assert_eq!(a.patch_trend, PatchTrendCategory::Slow);
        assert_eq!(a.vuln_trend, VulnTrendCategory::Low);
        assert_eq!(a.risk, RiskLevel::Medium);
        assert!(a.patch_fallback() && a.vuln_fallback());
    }
}
