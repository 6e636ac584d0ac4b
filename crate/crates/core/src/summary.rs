//! Corpus descriptive statistics: pooled patch-interval and
//! vulnerabilities-per-device distributions, their fixed-width histograms,
//! and a printable summary.

use crate::ingest::DatasetWorkspace;
use std::fmt;
use std::io::Write;
use std::path::Path;

/// Number of bins every histogram uses, matching the plots the corpus
/// statistics were designed around.
pub const HISTOGRAM_BINS: usize = 60;

/// A fixed 60-bin histogram over non-negative integer-valued data. Bin `i`
/// covers `[i*width, (i+1)*width)`; empty bins are kept so the shape is
/// always the same.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bin_width: u64,
    pub counts: [u64; HISTOGRAM_BINS],
}

impl Histogram {
    /// Builds the histogram from values (fractional values land in the bin
    /// of their floor). The width is the smallest integer that fits the
    /// maximum into the last bin, and at least one.
    pub fn build(values: &[f64]) -> Histogram {
        let max = values.iter().cloned().fold(0.0_f64, f64::max);
        let bin_width = (((max + 1.0) / HISTOGRAM_BINS as f64).ceil() as u64).max(1);
        let mut counts = [0u64; HISTOGRAM_BINS];
        for &v in values {
            let bin = ((v.max(0.0) as u64) / bin_width).min(HISTOGRAM_BINS as u64 - 1);
            counts[bin as usize] += 1;
        }
        Histogram { bin_width, counts }
    }
}

/// Writes a histogram as CSV with exclusive bin ends; all 60 rows are
/// present, zeros included.
pub fn write_histogram_csv(hist: &Histogram, path: &Path) -> std::io::Result<()> {
    let mut out: Vec<u8> = Vec::new();
    writeln!(out, "bin_start,bin_end,count")?;
    for (i, count) in hist.counts.iter().enumerate() {
        let start = i as u64 * hist.bin_width;
        writeln!(out, "{start},{},{count}", start + hist.bin_width)?;
    }
    std::fs::write(path, out)
}

/// Five-number summary plus mean. Quartiles interpolate linearly between
/// order statistics (the convention spreadsheet and numpy defaults share).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSummary {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl DistributionSummary {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<DistributionSummary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Some(DistributionSummary {
            count: sorted.len(),
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            max: *sorted.last().expect("non-empty"),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        })
    }
}

/// Corpus-wide descriptive statistics over a workspace.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSummary {
    pub devices: usize,
    pub devices_with_patches: usize,
    pub devices_with_vulns: usize,
    pub total_patch_intervals: usize,
    pub total_vulnerabilities: usize,
    /// Pooled over every device's intervals; `None` without any patch data.
    pub patch_intervals: Option<DistributionSummary>,
    /// Over devices that have at least one vulnerability.
    pub vulns_per_device: Option<DistributionSummary>,
}

/// Pools every device's patch intervals into one sample.
pub fn pooled_intervals(ws: &DatasetWorkspace) -> Vec<f64> {
    let mut values = Vec::new();
    for series in ws.patch.values() {
        values.extend(series.values());
    }
    values
}

/// Vulnerability counts for devices that have at least one.
pub fn vuln_counts(ws: &DatasetWorkspace) -> Vec<f64> {
    ws.severity
        .values()
        .map(|s| s.len() as f64)
        .filter(|&n| n > 0.0)
        .collect()
}

pub fn interval_histogram(ws: &DatasetWorkspace) -> Histogram {
    Histogram::build(&pooled_intervals(ws))
}

pub fn vulns_per_device_histogram(ws: &DatasetWorkspace) -> Histogram {
    Histogram::build(&vuln_counts(ws))
}

pub fn summarize(ws: &DatasetWorkspace) -> CorpusSummary {
    let intervals = pooled_intervals(ws);
    let counts = vuln_counts(ws);
    CorpusSummary {
        devices: ws.devices.len(),
        devices_with_patches: ws.patch.values().filter(|s| !s.is_empty()).count(),
        devices_with_vulns: counts.len(),
        total_patch_intervals: intervals.len(),
        total_vulnerabilities: counts.iter().map(|&c| c as usize).sum(),
        patch_intervals: DistributionSummary::of(&intervals),
        vulns_per_device: DistributionSummary::of(&counts),
    }
}

impl fmt::Display for CorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "devices: {}", self.devices)?;
        writeln!(
            f,
            "devices with patch data: {} (without: {})",
            self.devices_with_patches,
            self.devices - self.devices_with_patches
        )?;
        writeln!(f, "devices with vulnerabilities: {}", self.devices_with_vulns)?;
        writeln!(f, "patch intervals observed: {}", self.total_patch_intervals)?;
        writeln!(f, "vulnerabilities observed: {}", self.total_vulnerabilities)?;
        match &self.patch_intervals {
            Some(d) => {
                writeln!(
                    f,
                    "patch interval days: min {:.0}, q1 {:.0}, median {:.0}, q3 {:.0}, max {:.0}, mean {:.1}",
                    d.min, d.q1, d.median, d.q3, d.max, d.mean
                )?;
            }
            None => writeln!(f, "patch interval days: no data")?,
        }
        match &self.vulns_per_device {
            Some(d) => {
                writeln!(
                    f,
                    "vulnerabilities per device: min {:.0}, q1 {:.1}, median {:.1}, q3 {:.1}, max {:.0}, mean {:.1}",
                    d.min, d.q1, d.median, d.q3, d.max, d.mean
                )?;
            }
            None => writeln!(f, "vulnerabilities per device: no data")?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        DeviceCategory, DeviceModel, PatchIntervalSeries, PatchPoint, SeverityPoint,
        SeveritySeries,
    };
    use chrono::NaiveDate;

    fn day(i: u64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(i)
    }

    fn workspace(specs: &[(&str, &[u32], usize)]) -> DatasetWorkspace {
        let devices = specs
            .iter()
            .map(|(id, _, _)| DeviceModel {
                id: id.to_string(),
                vendor: "vendonet".into(),
                name: id.to_string(),
                category: DeviceCategory::Other,
            })
            .collect();
        let mut ws = DatasetWorkspace::new(devices).unwrap();
        for (id, intervals, vulns) in specs {
            let patches = PatchIntervalSeries::new(
                id.to_string(),
                intervals
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| PatchPoint {
                        date: day(10 * i as u64),
                        interval_days: v,
                    })
                    .collect(),
            )
            .unwrap();
            let severities = SeveritySeries::new(
                id.to_string(),
                (0..*vulns)
                    .map(|i| SeverityPoint {
                        date: day(10 * i as u64),
                        cvss: 5.0,
                    })
                    .collect(),
            )
            .unwrap();
            ws.insert_series(patches, severities).unwrap();
        }
        ws
    }

    #[test]
    fn single_zero_interval_lands_in_bin_zero() {
        let hist = Histogram::build(&[0.0]);
        assert_eq!(hist.bin_width, 1);
        assert_eq!(hist.counts[0], 1);
        assert_eq!(hist.counts[1..].iter().sum::<u64>(), 0);
    }

    #[test]
    fn histogram_always_has_sixty_bins_and_covers_the_max() {
        let hist = Histogram::build(&[0.0, 100.0, 5999.0]);
        assert_eq!(hist.counts.len(), 60);
        assert_eq!(hist.bin_width, 100);
        assert_eq!(hist.counts.iter().sum::<u64>(), 3);
    }

    #[test]
    fn histogram_bins_by_floor_division() {
        let hist = Histogram::build(&[0.0, 99.0, 100.0, 5999.0]);
        assert_eq!(hist.bin_width, 100);
        assert_eq!(hist.counts[0], 2); // 0 and 99
        assert_eq!(hist.counts[1], 1); // 100
        assert_eq!(hist.counts[59], 1); // 5999
    }

    #[test]
    fn histogram_csv_has_sixty_zero_padded_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hist.csv");
        write_histogram_csv(&Histogram::build(&[0.0]), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 61);
        assert_eq!(lines[0], "bin_start,bin_end,count");
        assert_eq!(lines[1], "0,1,1");
        assert_eq!(lines[2], "1,2,0");
        assert_eq!(lines[60], "59,60,0");
    }

    #[test]
    fn quartiles_interpolate_between_order_statistics() {
        let d = DistributionSummary::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(d.q1, 1.75);
        assert_eq!(d.median, 2.5);
        assert_eq!(d.q3, 3.25);
        assert_eq!(d.mean, 2.5);
        assert_eq!((d.min, d.max, d.count), (1.0, 4.0, 4));
    }

    #[test]
    fn three_point_quartiles() {
        let d = DistributionSummary::of(&[316.0, 634.0, 1170.0]).unwrap();
        assert_eq!(d.q1, 475.0);
        assert_eq!(d.median, 634.0);
        assert_eq!(d.q3, 902.0);
    }

    #[test]
    fn empty_sample_has_no_summary() {
        assert_eq!(DistributionSummary::of(&[]), None);
    }

    #[test]
    fn summary_counts_devices_and_pools_intervals() {
        let ws = workspace(&[
            ("a", &[10, 20], 3),
            ("b", &[30], 0),
            ("c", &[], 2),
        ]);
        let s = summarize(&ws);
        assert_eq!(s.devices, 3);
        assert_eq!(s.devices_with_patches, 2);
        assert_eq!(s.devices_with_vulns, 2);
        assert_eq!(s.total_patch_intervals, 3);
        assert_eq!(s.total_vulnerabilities, 5);
        let d = s.patch_intervals.unwrap();
        assert_eq!(d.median, 20.0);
        let v = s.vulns_per_device.unwrap();
        assert_eq!((v.min, v.max), (2.0, 3.0));
    }

    #[test]
    fn display_mentions_quartiles_and_missing_data() {
        let ws = workspace(&[("a", &[316, 634, 1170], 1)]);
        let text = summarize(&ws).to_string();
        assert!(text.contains("median 634"));
        assert!(text.contains("q1 475"));
        assert!(text.contains("q3 902"));

        let empty = workspace(&[("b", &[], 0)]);
        let text = summarize(&empty).to_string();
        assert!(text.contains("patch interval days: no data"));
        assert!(text.contains("without: 1"));
    }

    #[test]
    fn interval_histogram_pools_all_devices() {
        let ws = workspace(&[("a", &[5, 10], 0), ("b", &[15], 0)]);
        let hist = interval_histogram(&ws);
        assert_eq!(hist.counts.iter().sum::<u64>(), 3);
    }

    #[test]
    fn vuln_histogram_skips_devices_without_vulnerabilities() {
        let ws = workspace(&[("a", &[], 4), ("b", &[], 0), ("c", &[], 1)]);
        let hist = vulns_per_device_histogram(&ws);
        assert_eq!(hist.counts.iter().sum::<u64>(), 2);
    }
}
