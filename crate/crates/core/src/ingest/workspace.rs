//! Workspace persistence.
//!
//! The on-disk layout is deliberately plain so other tooling can read it:
//!
//! ```text
//! <dir>/devices.json       all device models
//! <dir>/patch/<id>.csv     date,interval_days
//! <dir>/sev/<id>.csv       date,cvss
//! <dir>/provenance.json    input-file SHA-256 digests (optional)
//! ```
//!
//! Dates are ISO (`YYYY-MM-DD`), line endings LF, and floats print in
//! shortest round-trip form, so save -> load -> save reproduces files
//! byte for byte.

use crate::ingest::IngestError;
use crate::model::{DeviceModel, PatchIntervalSeries, PatchPoint, SeverityPoint, SeveritySeries};
use chrono::NaiveDate;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// All ingested data for a corpus: the device list plus one patch and one
/// severity series per device (empty series for devices without history).
#[derive(Debug, Clone, Default)]
pub struct DatasetWorkspace {
    pub devices: Vec<DeviceModel>,
    pub patch: BTreeMap<String, PatchIntervalSeries>,
    pub severity: BTreeMap<String, SeveritySeries>,
    /// Input-file SHA-256 digests recorded at ingest time.
    pub provenance: BTreeMap<String, String>,
}

fn check_device_id(id: &str) -> Result<(), IngestError> {
    let ok = !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'));
    if ok {
        Ok(())
    } else {
        Err(IngestError::SchemaError {
            field: "device.id".into(),
            reason: format!("{id:?} is not a safe file name"),
        })
    }
}

impl DatasetWorkspace {
    /// Creates a workspace over `devices`, checking ids are unique and safe
    /// to use as file names.
    pub fn new(devices: Vec<DeviceModel>) -> Result<Self, IngestError> {
        let mut seen = BTreeSet::new();
        for d in &devices {
            check_device_id(&d.id)?;
            if !seen.insert(d.id.clone()) {
                return Err(IngestError::DuplicateDevice(d.id.clone()));
            }
        }
        Ok(DatasetWorkspace {
            devices,
            ..DatasetWorkspace::default()
        })
    }

    /// Attaches the two series of a known device.
    pub fn insert_series(
        &mut self,
        patch: PatchIntervalSeries,
        severity: SeveritySeries,
    ) -> Result<(), IngestError> {
        let id = patch.device_id.clone();
        if !self.devices.iter().any(|d| d.id == id) {
            return Err(IngestError::UnknownDevice(id));
        }
        self.patch.insert(id.clone(), patch);
        self.severity.insert(id, severity);
        Ok(())
    }

    pub fn patch_series(&self, device_id: &str) -> Option<&PatchIntervalSeries> {
        self.patch.get(device_id)
    }

    pub fn severity_series(&self, device_id: &str) -> Option<&SeveritySeries> {
        self.severity.get(device_id)
    }
}

/// SHA-256 of a file's bytes as lowercase hex, for provenance records.
pub fn file_digest(path: &Path) -> Result<String, IngestError> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn corrupt(file: &Path, reason: impl Into<String>) -> IngestError {
    IngestError::CorruptWorkspace {
        file: file.display().to_string(),
        reason: reason.into(),
    }
}

/// Reads a JSON list of device models — the same format a saved workspace's
/// `devices.json` uses.
pub fn load_device_models(path: &Path) -> Result<Vec<DeviceModel>, IngestError> {
    let json = std::fs::read_to_string(path).map_err(|e| corrupt(path, e.to_string()))?;
    serde_json::from_str(&json).map_err(|e| corrupt(path, e.to_string()))
}

/// Writes the workspace under `dir`, creating it as needed. Existing files
/// for the same devices are overwritten.
pub fn save_workspace(ws: &DatasetWorkspace, dir: &Path) -> Result<(), IngestError> {
    std::fs::create_dir_all(dir.join("patch"))?;
    std::fs::create_dir_all(dir.join("sev"))?;

    let mut devices_json = serde_json::to_string_pretty(&ws.devices)
        .expect("device models always serialize");
    devices_json.push('\n');
    std::fs::write(dir.join("devices.json"), devices_json)?;

    for device in &ws.devices {
        let mut patch_csv = String::from("date,interval_days\n");
        if let Some(series) = ws.patch.get(&device.id) {
            for p in series.points() {
                patch_csv.push_str(&format!("{},{}\n", p.date, p.interval_days));
            }
        }
        std::fs::write(dir.join("patch").join(format!("{}.csv", device.id)), patch_csv)?;

        let mut sev_csv = String::from("date,cvss\n");
        if let Some(series) = ws.severity.get(&device.id) {
            for p in series.points() {
                sev_csv.push_str(&format!("{},{}\n", p.date, p.cvss));
            }
        }
        std::fs::write(dir.join("sev").join(format!("{}.csv", device.id)), sev_csv)?;
    }

    let mut prov_json = serde_json::to_string_pretty(&ws.provenance)
        .expect("string map always serializes");
    prov_json.push('\n');
    std::fs::write(dir.join("provenance.json"), prov_json)?;
    Ok(())
}

fn parse_two_columns<'a>(
    path: &Path,
    text: &'a str,
    expected_header: &str,
) -> Result<Vec<(NaiveDate, &'a str)>, IngestError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == expected_header => {}
        other => {
            return Err(corrupt(
                path,
                format!("expected header {expected_header:?}, found {other:?}"),
            ))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let Some((date_text, value)) = line.split_once(',') else {
            return Err(corrupt(path, format!("line {}: missing comma", idx + 2)));
        };
        let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d")
            .map_err(|e| corrupt(path, format!("line {}: {e}", idx + 2)))?;
        rows.push((date, value));
    }
    Ok(rows)
}

/// Loads a workspace saved by [`save_workspace`]. A missing or unreadable
/// piece (device list, any per-device file, any cell) fails the load;
/// `provenance.json` alone may be absent.
pub fn load_workspace(dir: &Path) -> Result<DatasetWorkspace, IngestError> {
    let devices = load_device_models(&dir.join("devices.json"))?;
    let mut ws = DatasetWorkspace::new(devices)?;

    for device in ws.devices.clone() {
        let patch_path = dir.join("patch").join(format!("{}.csv", device.id));
        let text = std::fs::read_to_string(&patch_path)
            .map_err(|e| corrupt(&patch_path, e.to_string()))?;
        let mut points = Vec::new();
        for (date, value) in parse_two_columns(&patch_path, &text, "date,interval_days")? {
            let interval_days: u32 = value
                .parse()
                .map_err(|_| corrupt(&patch_path, format!("bad interval {value:?}")))?;
            points.push(PatchPoint { date, interval_days });
        }
        let patch = PatchIntervalSeries::new(device.id.clone(), points)
            .map_err(|e| corrupt(&patch_path, e.to_string()))?;

        let sev_path = dir.join("sev").join(format!("{}.csv", device.id));
        let text = std::fs::read_to_string(&sev_path)
            .map_err(|e| corrupt(&sev_path, e.to_string()))?;
        let mut points = Vec::new();
        for (date, value) in parse_two_columns(&sev_path, &text, "date,cvss")? {
            let cvss: f64 = value
                .parse()
                .map_err(|_| corrupt(&sev_path, format!("bad score {value:?}")))?;
            points.push(SeverityPoint { date, cvss });
        }
        let severity = SeveritySeries::new(device.id.clone(), points)
            .map_err(|e| corrupt(&sev_path, e.to_string()))?;

        ws.patch.insert(device.id.clone(), patch);
        ws.severity.insert(device.id.clone(), severity);
    }

    let prov_path = dir.join("provenance.json");
    if prov_path.exists() {
        let text = std::fs::read_to_string(&prov_path)
            .map_err(|e| corrupt(&prov_path, e.to_string()))?;
        ws.provenance = serde_json::from_str(&text)
            .map_err(|e| corrupt(&prov_path, e.to_string()))?;
    }
    Ok(ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DeviceCategory;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn sample_workspace() -> DatasetWorkspace {
        let devices = vec![
            DeviceModel {
                id: "cam-200".into(),
                vendor: "vendonet".into(),
                name: "cam-200".into(),
                category: DeviceCategory::Cctv,
            },
            DeviceModel {
                id: "sw-24p".into(),
                vendor: "lanvolt".into(),
                name: "sw-24p".into(),
                category: DeviceCategory::Switch,
            },
        ];
        let mut ws = DatasetWorkspace::new(devices).unwrap();
        let patch = PatchIntervalSeries::new(
            "cam-200".into(),
            vec![
                PatchPoint { date: date(2018, 1, 1), interval_days: 151 },
                PatchPoint { date: date(2018, 3, 1), interval_days: 92 },
            ],
        )
        .unwrap();
        let severity = SeveritySeries::new(
            "cam-200".into(),
            vec![
                SeverityPoint { date: date(2018, 1, 1), cvss: 7.5 },
                SeverityPoint { date: date(2018, 3, 1), cvss: 5.0 },
            ],
        )
        .unwrap();
        ws.insert_series(patch, severity).unwrap();
        ws.provenance.insert("feed.json".into(), "ab".repeat(32));
        ws
    }

    #[test]
    fn save_load_round_trips_values() {
        let dir = tempfile::tempdir().unwrap();
        let ws = sample_workspace();
        save_workspace(&ws, dir.path()).unwrap();
        let loaded = load_workspace(dir.path()).unwrap();
        assert_eq!(loaded.devices, ws.devices);
        assert_eq!(loaded.patch.get("cam-200"), ws.patch.get("cam-200"));
        assert_eq!(loaded.severity.get("cam-200"), ws.severity.get("cam-200"));
        assert_eq!(loaded.provenance, ws.provenance);
        // Devices without series load as empty histories.
        assert!(loaded.patch.get("sw-24p").unwrap().is_empty());
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        save_workspace(&sample_workspace(), first.path()).unwrap();
        let loaded = load_workspace(first.path()).unwrap();
        save_workspace(&loaded, second.path()).unwrap();

        for rel in [
            "devices.json",
            "provenance.json",
            "patch/cam-200.csv",
            "patch/sw-24p.csv",
            "sev/cam-200.csv",
            "sev/sw-24p.csv",
        ] {
            let a = std::fs::read(first.path().join(rel)).unwrap();
            let b = std::fs::read(second.path().join(rel)).unwrap();
            assert_eq!(a, b, "{rel} differs");
        }
    }

    #[test]
    fn csv_uses_iso_dates_and_lf() {
        let dir = tempfile::tempdir().unwrap();
        save_workspace(&sample_workspace(), dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("patch/cam-200.csv")).unwrap();
        assert_eq!(text, "date,interval_days\n2018-01-01,151\n2018-03-01,92\n");
        let text = std::fs::read_to_string(dir.path().join("sev/cam-200.csv")).unwrap();
        assert_eq!(text, "date,cvss\n2018-01-01,7.5\n2018-03-01,5\n");
    }

    #[test]
    fn missing_device_list_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_workspace(dir.path()).unwrap_err();
        assert!(matches!(err, IngestError::CorruptWorkspace { file, .. }
            if file.ends_with("devices.json")));
    }

    #[test]
    fn mangled_series_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        save_workspace(&sample_workspace(), dir.path()).unwrap();
        std::fs::write(dir.path().join("patch/cam-200.csv"), "date,interval_days\nnot-a-date,5\n")
            .unwrap();
        let err = load_workspace(dir.path()).unwrap_err();
        assert!(matches!(err, IngestError::CorruptWorkspace { .. }));
    }

    #[test]
    fn missing_provenance_is_tolerated() {
        let dir = tempfile::tempdir().unwrap();
        save_workspace(&sample_workspace(), dir.path()).unwrap();
        std::fs::remove_file(dir.path().join("provenance.json")).unwrap();
        let ws = load_workspace(dir.path()).unwrap();
        assert!(ws.provenance.is_empty());
    }

    #[test]
    fn unsafe_device_ids_are_rejected() {
        let device = DeviceModel {
            id: "../evil".into(),
            vendor: "v".into(),
            name: "n".into(),
            category: DeviceCategory::Other,
        };
        assert!(matches!(
            DatasetWorkspace::new(vec![device]),
            Err(IngestError::SchemaError { .. })
        ));
    }

    #[test]
    fn duplicate_device_ids_are_rejected() {
        let d = DeviceModel {
            id: "dup".into(),
            vendor: "v".into(),
            name: "n".into(),
            category: DeviceCategory::Other,
        };
        assert!(matches!(
            DatasetWorkspace::new(vec![d.clone(), d]),
            Err(IngestError::DuplicateDevice(id)) if id == "dup"
        ));
    }
}
