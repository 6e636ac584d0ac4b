//! `fdsri report`: corpus descriptive statistics and optional histograms.

use crate::args::ReportArgs;
use crate::CliError;
use fdsri_core::ingest::load_workspace;
use fdsri_core::summary::{
    interval_histogram, summarize, vulns_per_device_histogram, write_histogram_csv,
};

pub fn run(args: &ReportArgs) -> Result<(), CliError> {
    let ws = load_workspace(&args.workspace)?;
    print!("{}", summarize(&ws));

    if args.histograms {
        std::fs::create_dir_all(&args.out)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", args.out.display())))?;
        let intervals_path = args.out.join("hist_patch_intervals.csv");
        let vulns_path = args.out.join("hist_vulns_per_device.csv");
        write_histogram_csv(&interval_histogram(&ws), &intervals_path)
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", intervals_path.display())))?;
        write_histogram_csv(&vulns_per_device_histogram(&ws), &vulns_path)
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", vulns_path.display())))?;
        println!(
            "wrote {} and {}",
            intervals_path.display(),
            vulns_path.display()
        );
    }
    Ok(())
}
