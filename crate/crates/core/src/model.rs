//! Core domain types: devices, vulnerability records, dated series of patch
//! intervals and severities, and the chronological train/test split.
//!
//! Series constructors enforce the ordering and range invariants the rest of
//! the pipeline relies on, so downstream code can take them for granted.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("patch released {released} before CVE publication {published}")]
    NegativeInterval {
        published: NaiveDate,
        released: NaiveDate,
    },
    #[error("series has {0} points, need at least 3")]
    TooFewPoints(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("series points are not in ascending date order")]
    UnsortedSeries,
    #[error("CVSS score {0} outside [0, 10]")]
    CvssOutOfRange(f64),
    #[error("malformed CVE id {0:?}")]
    BadCveId(String),
    #[error("split ratio {0} outside (0, 1)")]
    BadRatio(f64),
}

/// Device hardware class, used only to break reports down by category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DeviceCategory {
    #[serde(rename = "CCTV")]
    Cctv,
    Streaming,
    Switch,
    Speaker,
    Controller,
    #[serde(rename = "IP2Serial")]
    Ip2Serial,
    Other,
}

impl DeviceCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            DeviceCategory::Cctv => "CCTV",
            DeviceCategory::Streaming => "Streaming",
            DeviceCategory::Switch => "Switch",
            DeviceCategory::Speaker => "Speaker",
            DeviceCategory::Controller => "Controller",
            DeviceCategory::Ip2Serial => "IP2Serial",
            DeviceCategory::Other => "Other",
        }
    }
}

impl std::fmt::Display for DeviceCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One device model under assessment. `id` is the workspace-unique key;
/// `vendor` and `name` together identify the product in CVE feeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub id: String,
    pub vendor: String,
    pub name: String,
    pub category: DeviceCategory,
}

impl DeviceModel {
    /// Key used to match this device against CVE feed `products` lists.
    pub fn product_key(&self) -> String {
        format!("{}:{}", self.vendor, self.name)
    }
}

/// Returns true when `id` has the canonical `CVE-<year>-<number>` shape
/// (four-digit year, at least four digits of sequence number).
pub fn is_valid_cve_id(id: &str) -> bool {
    let Some(rest) = id.strip_prefix("CVE-") else {
        return false;
    };
    let Some((year, seq)) = rest.split_once('-') else {
        return false;
    };
    year.len() == 4
        && year.bytes().all(|b| b.is_ascii_digit())
        && seq.len() >= 4
        && seq.bytes().all(|b| b.is_ascii_digit())
}

/// A published vulnerability with its CVSS v2 base score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VulnerabilityRecord {
    pub cve_id: String,
    pub published: NaiveDate,
    pub cvss_v2: f64,
}

impl VulnerabilityRecord {
    pub fn new(cve_id: String, published: NaiveDate, cvss_v2: f64) -> Result<Self, ModelError> {
        if !is_valid_cve_id(&cve_id) {
            return Err(ModelError::BadCveId(cve_id));
        }
        if !(0.0..=10.0).contains(&cvss_v2) {
            return Err(ModelError::CvssOutOfRange(cvss_v2));
        }
        Ok(VulnerabilityRecord {
            cve_id,
            published,
            cvss_v2,
        })
    }
}

/// A vulnerability matched to the firmware release that fixed it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchEvent {
    pub cve_id: String,
    pub cve_published: NaiveDate,
    pub patch_released: NaiveDate,
    /// Days from publication to fix; zero for a same-day patch.
    pub interval_days: u32,
}

impl PatchEvent {
    pub fn new(
        cve_id: String,
        cve_published: NaiveDate,
        patch_released: NaiveDate,
    ) -> Result<Self, ModelError> {
        let interval_days = compute_patch_interval(cve_published, patch_released)?;
        Ok(PatchEvent {
            cve_id,
            cve_published,
            patch_released,
            interval_days,
        })
    }
}

/// Calendar days from `published` to `released`; errors when the patch
/// predates the publication.
pub fn compute_patch_interval(
    published: NaiveDate,
    released: NaiveDate,
) -> Result<u32, ModelError> {
    let days = (released - published).num_days();
    if days < 0 {
        return Err(ModelError::NegativeInterval {
            published,
            released,
        });
    }
    Ok(days as u32)
}

/// One patch-interval observation, stamped with the CVE publication date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchPoint {
    pub date: NaiveDate,
    pub interval_days: u32,
}

/// Per-device time series of patch intervals, ascending by date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchIntervalSeries {
    pub device_id: String,
    points: Vec<PatchPoint>,
}

impl PatchIntervalSeries {
    pub fn new(device_id: String, points: Vec<PatchPoint>) -> Result<Self, ModelError> {
        if !points.windows(2).all(|w| w[0].date <= w[1].date) {
            return Err(ModelError::UnsortedSeries);
        }
        Ok(PatchIntervalSeries { device_id, points })
    }

    pub fn points(&self) -> &[PatchPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| f64::from(p.interval_days)).collect()
    }

    pub fn dated_values(&self) -> Vec<(NaiveDate, f64)> {
        self.points
            .iter()
            .map(|p| (p.date, f64::from(p.interval_days)))
            .collect()
    }
}

/// One severity observation: a CVE publication date and its CVSS score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeverityPoint {
    pub date: NaiveDate,
    pub cvss: f64,
}

/// Per-device time series of CVSS severities, ascending by date, scores in
/// [0, 10].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeveritySeries {
    pub device_id: String,
    points: Vec<SeverityPoint>,
}

impl SeveritySeries {
    pub fn new(device_id: String, points: Vec<SeverityPoint>) -> Result<Self, ModelError> {
        if !points.windows(2).all(|w| w[0].date <= w[1].date) {
            return Err(ModelError::UnsortedSeries);
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=10.0).contains(&p.cvss)) {
            return Err(ModelError::CvssOutOfRange(p.cvss));
        }
        Ok(SeveritySeries { device_id, points })
    }

    pub fn points(&self) -> &[SeverityPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.cvss).collect()
    }

    pub fn dated_values(&self) -> Vec<(NaiveDate, f64)> {
        self.points.iter().map(|p| (p.date, p.cvss)).collect()
    }
}

/// Chronological split of a series: `train` is the leading slice, `test` the
/// remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationSplit<'a, T> {
    pub train: &'a [T],
    pub test: &'a [T],
    pub ratio: f64,
}

/// Splits `points` chronologically, putting `round(ratio * n)` points (at
/// least two) into the train slice. Requires `n >= 3` so both slices can be
/// non-trivial at the default ratio.
pub fn train_test_split<T>(points: &[T], ratio: f64) -> Result<EvaluationSplit<'_, T>, ModelError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ModelError::BadRatio(ratio));
    }
    let n = points.len();
    if n < 3 {
        return Err(ModelError::TooFewPoints(n));
    }
    let train_len = ((ratio * n as f64).round() as usize).max(2);
    let (train, test) = points.split_at(train_len.min(n));
    Ok(EvaluationSplit { train, test, ratio })
}

/// Median of `values` (mean of the two central order statistics for even
/// lengths). Shared by the MAD metric, report aggregation, and trend
/// categorization.
pub fn series_median(values: &[f64]) -> Result<f64, ModelError> {
    if values.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("median input must not contain NaN"));
    let n = sorted.len();
    if n % 2 == 1 {
        Ok(sorted[n / 2])
    } else {
        Ok((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn patch_interval_spans_months() {
        // 31 (Jan) + 28 + 31 + 30 + 31 = 151 days.
        let days = compute_patch_interval(date(2018, 1, 1), date(2018, 6, 1)).unwrap();
        assert_eq!(days, 151);
    }

    #[test]
    fn patch_interval_same_day_is_zero() {
        assert_eq!(compute_patch_interval(date(2020, 3, 5), date(2020, 3, 5)).unwrap(), 0);
    }

    #[test]
    fn patch_interval_rejects_patch_before_publication() {
        let err = compute_patch_interval(date(2020, 3, 5), date(2020, 3, 4)).unwrap_err();
        assert!(matches!(err, ModelError::NegativeInterval { .. }));
    }

    #[test]
    fn patch_event_carries_interval() {
        let ev = PatchEvent::new("CVE-2018-0001".into(), date(2018, 1, 1), date(2018, 6, 1)).unwrap();
        assert_eq!(ev.interval_days, 151);
    }

    #[test]
    fn cve_id_validation() {
        assert!(is_valid_cve_id("CVE-2018-0001"));
        assert!(is_valid_cve_id("CVE-2021-44228"));
        assert!(!is_valid_cve_id("CVE-18-0001"));
        assert!(!is_valid_cve_id("CVE-2018-1"));
        assert!(!is_valid_cve_id("cve-2018-0001"));
        assert!(!is_valid_cve_id("CVE-2018-00a1"));
        assert!(!is_valid_cve_id("GHSA-xxxx-yyyy"));
    }

    #[test]
    fn vulnerability_record_validates_score() {
        let err = VulnerabilityRecord::new("CVE-2020-1234".into(), date(2020, 1, 1), 10.1).unwrap_err();
        assert_eq!(err, ModelError::CvssOutOfRange(10.1));
        let rec = VulnerabilityRecord::new("CVE-2020-1234".into(), date(2020, 1, 1), 10.0).unwrap();
        assert_eq!(rec.cvss_v2, 10.0);
    }

    #[test]
    fn series_reject_unsorted_points() {
        let pts = vec![
            PatchPoint { date: date(2020, 2, 1), interval_days: 5 },
            PatchPoint { date: date(2020, 1, 1), interval_days: 7 },
        ];
        assert_eq!(
            PatchIntervalSeries::new("d1".into(), pts).unwrap_err(),
            ModelError::UnsortedSeries
        );
    }

    #[test]
    fn severity_series_rejects_out_of_range() {
        let pts = vec![SeverityPoint { date: date(2020, 1, 1), cvss: -0.1 }];
        assert_eq!(
            SeveritySeries::new("d1".into(), pts).unwrap_err(),
            ModelError::CvssOutOfRange(-0.1)
        );
    }

    #[test]
    fn split_examples() {
        // n = 3 at ratio 0.66: round(1.98) = 2 train, 1 test.
        let s = train_test_split(&[1, 2, 3], 0.66).unwrap();
        assert_eq!((s.train, s.test), (&[1, 2][..], &[3][..]));

        // n = 10: round(6.6) = 7.
        let v: Vec<i32> = (0..10).collect();
        let s = train_test_split(&v, 0.66).unwrap();
        assert_eq!(s.train.len(), 7);
        assert_eq!(s.test.len(), 3);

        // n = 100: round(66.0) = 66.
        let v: Vec<i32> = (0..100).collect();
        let s = train_test_split(&v, 0.66).unwrap();
        assert_eq!(s.train.len(), 66);
        assert_eq!(s.test.len(), 34);
    }

    #[test]
    fn split_floors_train_at_two() {
        let v: Vec<i32> = (0..5).collect();
        let s = train_test_split(&v, 0.1).unwrap();
        assert_eq!(s.train.len(), 2);
        assert_eq!(s.test.len(), 3);
    }

    #[test]
    fn split_rejects_short_series_and_bad_ratio() {
        assert_eq!(train_test_split(&[1, 2], 0.66).unwrap_err(), ModelError::TooFewPoints(2));
        assert_eq!(train_test_split(&[1, 2, 3], 1.0).unwrap_err(), ModelError::BadRatio(1.0));
        assert_eq!(train_test_split(&[1, 2, 3], 0.0).unwrap_err(), ModelError::BadRatio(0.0));
    }

    #[test]
    fn median_odd_even_and_corpus_quartile_value() {
        assert_eq!(series_median(&[316.0, 634.0, 1170.0]).unwrap(), 634.0);
        assert_eq!(series_median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(series_median(&[7.0]).unwrap(), 7.0);
        assert_eq!(series_median(&[]).unwrap_err(), ModelError::EmptyInput);
    }

    proptest! {
        #[test]
        fn split_is_a_partition(n in 3usize..200, ratio in 0.05f64..0.95) {
            let v: Vec<usize> = (0..n).collect();
            let s = train_test_split(&v, ratio).unwrap();
            prop_assert_eq!(s.train.len() + s.test.len(), n);
            prop_assert!(s.train.len() >= 2);
            let joined: Vec<usize> = s.train.iter().chain(s.test.iter()).copied().collect();
            prop_assert_eq!(joined, v);
        }

        #[test]
        fn median_is_permutation_invariant_and_bounded(
            mut v in proptest::collection::vec(-1e6f64..1e6, 1..50),
            seed in 0u64..1000,
        ) {
            let m = series_median(&v).unwrap();
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m >= lo && m <= hi);

            // Deterministic shuffle: rotate by the seed.
            let k = (seed as usize) % v.len();
            v.rotate_left(k);
            prop_assert_eq!(series_median(&v).unwrap(), m);
        }

        #[test]
        fn interval_is_additive_over_midpoints(
            start in 0i64..20000,
            a in 0i64..2000,
            b in 0i64..2000,
        ) {
            let d0 = NaiveDate::from_num_days_from_ce_opt(700000 + start as i32).unwrap();
            let d1 = d0 + chrono::Days::new(a as u64);
            let d2 = d1 + chrono::Days::new(b as u64);
            let whole = compute_patch_interval(d0, d2).unwrap();
            let left = compute_patch_interval(d0, d1).unwrap();
            let right = compute_patch_interval(d1, d2).unwrap();
            prop_assert_eq!(whole, left + right);
        }
    }
}
