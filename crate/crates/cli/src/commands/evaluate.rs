//! `fdsri evaluate`: train/test every predictor over the workspace and
//! write the aggregated report.

use crate::args::EvaluateArgs;
use crate::CliError;
use fdsri_core::eval::report::{
    count_skips, render_summary, write_report_csv, write_report_json,
};
use fdsri_core::eval::{aggregate_corpus, evaluate_corpus, EvalError};
use fdsri_core::ingest::load_workspace;

pub fn run(args: &EvaluateArgs) -> Result<(), CliError> {
    let cfg = super::eval_config(&args.model, args.ratio)?;
    let ws = load_workspace(&args.model.workspace)?;
    let evals = evaluate_corpus(&ws, &cfg);
    let report = aggregate_corpus(&evals, cfg.split_ratio).map_err(|e| match e {
        EvalError::EmptyCorpus => CliError::input("workspace contains no devices"),
        other => CliError::Internal(other.to_string()),
    })?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", args.out.display())))?;
    let json_path = args.out.join("report.json");
    let csv_path = args.out.join("report.csv");
    write_report_json(&report, &json_path)
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", json_path.display())))?;
    write_report_csv(&report, &csv_path)
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", csv_path.display())))?;

    print!("{}", render_summary(&report));
    let (patch_skips, vuln_skips) = count_skips(&evals);
    if patch_skips + vuln_skips > 0 {
        println!(
            "skipped for insufficient data: {patch_skips} patch trend(s), {vuln_skips} vulnerability trend(s)"
        );
    }
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}
