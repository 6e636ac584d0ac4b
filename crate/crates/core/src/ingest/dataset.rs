//! Joins release notes with the CVE feed into one device's histories.

use crate::ingest::{CveFeedEntry, IngestError, ReleaseNote};
use crate::model::{
    DeviceModel, PatchEvent, PatchIntervalSeries, PatchPoint, SeverityPoint, SeveritySeries,
};
use chrono::NaiveDate;
use std::collections::BTreeMap;

/// A device's assembled histories plus ingestion warnings.
#[derive(Debug, Clone)]
pub struct DeviceDataset {
    pub patch_series: PatchIntervalSeries,
    pub severity_series: SeveritySeries,
    pub events: Vec<PatchEvent>,
    /// CVE ids named on `Fixed:` lines that do not belong to this device's
    /// feed entries — kept for warning output, excluded from the series.
    pub dangling_cves: Vec<String>,
}

/// Builds the dataset for one device.
///
/// Severity history: every feed entry whose `products` contains the device's
/// `vendor:name` key, ordered by publication date (ties by CVE id). Patch
/// history: for each such CVE that some release note fixes, the interval
/// from publication to the **earliest** fixing release, stamped at the
/// publication date. A note that fixes a CVE outside the device's feed
/// entries contributes a dangling-CVE warning instead of an interval. A fix
/// released before its CVE's publication date is corrupt input and fails the
/// build.
pub fn build_device_dataset(
    device: &DeviceModel,
    notes: &[ReleaseNote],
    feed: &[CveFeedEntry],
) -> Result<DeviceDataset, IngestError> {
    let key = device.product_key();
    let mut matched: Vec<&CveFeedEntry> = feed
        .iter()
        .filter(|e| e.products.iter().any(|p| p == &key))
        .collect();
    matched.sort_by(|a, b| (a.published, &a.cve_id).cmp(&(b.published, &b.cve_id)));

    // Earliest fixing release per CVE id.
    let mut fixes: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    for note in notes {
        for cve in &note.fixed_cves {
            fixes
                .entry(cve.as_str())
                .and_modify(|d| *d = (*d).min(note.release_date))
                .or_insert(note.release_date);
        }
    }

    let severity_points: Vec<SeverityPoint> = matched
        .iter()
        .map(|e| SeverityPoint {
            date: e.published,
            cvss: e.cvss_v2,
        })
        .collect();

    let mut events = Vec::new();
    for entry in &matched {
        if let Some(&released) = fixes.get(entry.cve_id.as_str()) {
            events.push(PatchEvent::new(
                entry.cve_id.clone(),
                entry.published,
                released,
            )?);
        }
    }

    let matched_ids: std::collections::BTreeSet<&str> =
        matched.iter().map(|e| e.cve_id.as_str()).collect();
    let dangling_cves: Vec<String> = fixes
        .keys()
        .filter(|cve| !matched_ids.contains(**cve))
        .map(|cve| cve.to_string())
        .collect();

    let patch_points: Vec<PatchPoint> = events
        .iter()
        .map(|e| PatchPoint {
            date: e.cve_published,
            interval_days: e.interval_days,
        })
        .collect();

    Ok(DeviceDataset {
        patch_series: PatchIntervalSeries::new(device.id.clone(), patch_points)?,
        severity_series: SeveritySeries::new(device.id.clone(), severity_points)?,
        events,
        dangling_cves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DeviceCategory;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn device() -> DeviceModel {
        DeviceModel {
            id: "cam-200".into(),
            vendor: "vendonet".into(),
            name: "cam-200".into(),
            category: DeviceCategory::Cctv,
        }
    }

    fn entry(id: &str, published: NaiveDate, cvss: f64, products: &[&str]) -> CveFeedEntry {
        CveFeedEntry {
            cve_id: id.into(),
            published,
            cvss_v2: cvss,
            products: products.iter().map(|p| p.to_string()).collect(),
        }
    }

    fn note(version: &str, released: NaiveDate, fixed: &[&str]) -> ReleaseNote {
        ReleaseNote {
            firmware_version: version.into(),
            release_date: released,
            fixed_cves: fixed.iter().map(|c| c.to_string()).collect(),
        }
    }

    #[test]
    fn joins_feed_and_notes_into_series() {
        let feed = vec![
            entry("CVE-2018-0001", date(2018, 1, 1), 7.5, &["vendonet:cam-200"]),
            entry("CVE-2018-0002", date(2018, 3, 1), 5.0, &["vendonet:cam-200"]),
            entry("CVE-2018-0003", date(2018, 2, 1), 9.0, &["other:thing"]),
        ];
        let notes = vec![note("2.1.0", date(2018, 6, 1), &["CVE-2018-0001", "CVE-2018-0002"])];
        let ds = build_device_dataset(&device(), &notes, &feed).unwrap();

        assert_eq!(ds.severity_series.len(), 2);
        assert_eq!(ds.patch_series.len(), 2);
        // 2018-01-01 to 2018-06-01 spans 151 days.
        assert_eq!(ds.patch_series.points()[0].interval_days, 151);
        assert_eq!(ds.patch_series.points()[0].date, date(2018, 1, 1));
        assert_eq!(ds.patch_series.points()[1].interval_days, 92);
        assert!(ds.dangling_cves.is_empty());
    }

    #[test]
    fn earliest_fixing_release_wins() {
        let feed = vec![entry("CVE-2019-0100", date(2019, 1, 10), 6.0, &["vendonet:cam-200"])];
        let notes = vec![
            note("3.0", date(2019, 9, 1), &["CVE-2019-0100"]),
            note("2.5", date(2019, 3, 1), &["CVE-2019-0100"]),
        ];
        let ds = build_device_dataset(&device(), &notes, &feed).unwrap();
        assert_eq!(ds.events.len(), 1);
        assert_eq!(ds.events[0].patch_released, date(2019, 3, 1));
    }

    #[test]
    fn unpatched_cves_stay_in_severity_history_only() {
        let feed = vec![
            entry("CVE-2020-0001", date(2020, 1, 1), 9.8, &["vendonet:cam-200"]),
            entry("CVE-2020-0002", date(2020, 2, 1), 3.0, &["vendonet:cam-200"]),
        ];
        let notes = vec![note("1.1", date(2020, 3, 1), &["CVE-2020-0002"])];
        let ds = build_device_dataset(&device(), &notes, &feed).unwrap();
        assert_eq!(ds.severity_series.len(), 2);
        assert_eq!(ds.patch_series.len(), 1);
        assert_eq!(ds.patch_series.points()[0].date, date(2020, 2, 1));
    }

    #[test]
    fn note_cves_outside_the_device_are_dangling() {
        let feed = vec![entry("CVE-2020-0001", date(2020, 1, 1), 5.0, &["vendonet:cam-200"])];
        let notes = vec![note(
            "1.2",
            date(2020, 4, 1),
            &["CVE-2020-0001", "CVE-2020-9999", "CVE-2021-0042"],
        )];
        let ds = build_device_dataset(&device(), &notes, &feed).unwrap();
        assert_eq!(ds.patch_series.len(), 1);
        assert_eq!(ds.dangling_cves, vec!["CVE-2020-9999", "CVE-2021-0042"]);
    }

    #[test]
    fn severity_order_breaks_date_ties_by_cve_id() {
        let feed = vec![
            entry("CVE-2020-0200", date(2020, 5, 5), 4.0, &["vendonet:cam-200"]),
            entry("CVE-2020-0100", date(2020, 5, 5), 8.0, &["vendonet:cam-200"]),
        ];
        let ds = build_device_dataset(&device(), &[], &feed).unwrap();
        assert_eq!(ds.severity_series.points()[0].cvss, 8.0);
        assert_eq!(ds.severity_series.points()[1].cvss, 4.0);
    }

    #[test]
    fn fix_before_publication_is_corrupt() {
        let feed = vec![entry("CVE-2020-0001", date(2020, 6, 1), 5.0, &["vendonet:cam-200"])];
        let notes = vec![note("0.9", date(2020, 1, 1), &["CVE-2020-0001"])];
        let err = build_device_dataset(&device(), &notes, &feed).unwrap_err();
        assert!(matches!(err, IngestError::Model(_)));
    }
}
