//! `fdsri predict`: one forward assessment line per device.

use crate::args::PredictArgs;
use crate::CliError;
use fdsri_core::eval::predict_corpus;
use fdsri_core::ingest::load_workspace;

pub fn run(args: &PredictArgs) -> Result<(), CliError> {
    let cfg = super::eval_config(&args.model, 0.66)?;
    let ws = load_workspace(&args.model.workspace)?;
    if ws.devices.is_empty() {
        return Err(CliError::input("workspace contains no devices"));
    }
    for assessment in predict_corpus(&ws, &cfg) {
        println!(
            "{}, {}, {}, {}",
            assessment.device_id,
            assessment.patch_trend,
            assessment.vuln_trend,
            assessment.risk
        );
    }
    Ok(())
}
