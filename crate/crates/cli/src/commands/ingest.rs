//! `fdsri ingest`: release notes + CVE feed → saved dataset workspace.

use crate::args::IngestArgs;
use crate::CliError;
use fdsri_core::ingest::{
    build_device_dataset, file_digest, load_cve_feed, load_device_models, save_workspace,
    DatasetWorkspace, NoteParserRegistry, ReleaseNote,
};
use std::collections::BTreeMap;
use std::path::Path;

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run(args: &IngestArgs) -> Result<(), CliError> {
    let devices = load_device_models(&args.devices)?;
    let feed = load_cve_feed(&args.feed)?;
    let registry = NoteParserRegistry::default();

    // Each notes file belongs to the device its stem names.
    let mut notes_by_device: BTreeMap<String, Vec<ReleaseNote>> = BTreeMap::new();
    for path in &args.notes {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !devices.iter().any(|d| d.id == stem) {
            return Err(CliError::input(format!(
                "notes file {} does not match any device id",
                path.display()
            )));
        }
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input(format!("cannot read {}: {e}", path.display()))
        })?;
        let notes = registry.parse(&text, &args.parser)?;
        notes_by_device.entry(stem).or_default().extend(notes);
    }

    let mut ws = DatasetWorkspace::new(devices)?;
    let mut warnings = 0usize;
    let mut summaries = Vec::new();
    for device in ws.devices.clone() {
        let empty = Vec::new();
        let notes = notes_by_device.get(&device.id).unwrap_or(&empty);
        let dataset = build_device_dataset(&device, notes, &feed)?;
        summaries.push(format!(
            "{}: {} CVEs, {} patch intervals",
            device.id,
            dataset.severity_series.len(),
            dataset.patch_series.len()
        ));
        if !dataset.dangling_cves.is_empty() {
            warnings += dataset.dangling_cves.len();
            eprintln!(
                "warning: {}: {} fixed CVE(s) not in this device's feed entries: {}",
                device.id,
                dataset.dangling_cves.len(),
                dataset.dangling_cves.join(", ")
            );
        }
        ws.insert_series(dataset.patch_series, dataset.severity_series)?;
    }

    ws.provenance
        .insert(file_name(&args.devices), file_digest(&args.devices)?);
    ws.provenance
        .insert(file_name(&args.feed), file_digest(&args.feed)?);
    for path in &args.notes {
        ws.provenance.insert(file_name(path), file_digest(path)?);
    }

    save_workspace(&ws, &args.workspace)?;
    for line in summaries {
        println!("{line}");
    }
    if warnings > 0 {
        println!("{warnings} warning(s)");
    }
    Ok(())
}
