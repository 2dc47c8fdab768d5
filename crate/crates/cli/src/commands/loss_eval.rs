//! `loss-eval`: four-term loss, fidelity diagnostics, and an optional
//! finite-difference gradient check over a student/teacher tensor pair.

use std::path::PathBuf;

use pentrack_core::distill::{
    compute_loss, fidelity, gradient_check_max_rel_error, FidelityReport, LossBreakdown,
    LossWeights, GOOD_COSINE_MIN, GOOD_SCALE_RANGE,
};
use serde::Serialize;

use crate::commands::Ctx;
use crate::error::{CliError, CliResult};
use crate::formats::tensor::read_tensor;
use crate::manifest::{emit, emit_manifest_only, RunManifest};

/// The full check costs two loss evaluations per element; cap it to
/// diagnostic-sized tensors.
const GRADCHECK_MAX_ELEMENTS: usize = 10_000;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Student tensor (DTN1 or DTNH file).
    pub student: PathBuf,
    /// Teacher tensor (DTN1 or DTNH file).
    pub teacher: PathBuf,
    /// Comma-separated term weights: directional,cosine,moment,raw.
    #[arg(long, default_value = "1.0,0.5,0.3,0.1")]
    pub weights: String,
    /// Also verify the analytic gradient against central differences.
    #[arg(long)]
    pub gradcheck: bool,
}

fn parse_weights(spec: &str) -> CliResult<LossWeights> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::input(format!(
            "--weights needs 4 comma-separated values, got {}",
            parts.len()
        )));
    }
    let mut values = [0.0_f64; 4];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("bad weight `{part}`")))?;
    }
    LossWeights::new(values[0], values[1], values[2], values[3]).map_err(CliError::from)
}

#[derive(Serialize)]
struct Report {
    loss: LossBreakdown,
    fidelity: FidelityReport,
    fidelity_band: BandCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    gradcheck_max_rel_error: Option<f64>,
}

#[derive(Serialize)]
struct BandCheck {
    min_cosine: f64,
    scale_range: (f64, f64),
    pass: bool,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let weights = parse_weights(&args.weights)?;
    let mut manifest = RunManifest::new(
        "loss-eval",
        serde_json::json!({
            "student": args.student.display().to_string(),
            "teacher": args.teacher.display().to_string(),
            "weights": weights,
            "gradcheck": args.gradcheck,
        }),
    );
    manifest.digest_input(&args.student)?;
    manifest.digest_input(&args.teacher)?;
    if ctx.manifest_only {
        return emit_manifest_only(manifest, ctx.out.as_deref());
    }
    let student = read_tensor(&args.student)?;
    let teacher = read_tensor(&args.teacher)?;
    let loss = compute_loss(&student, &teacher, &weights)?;
    let fid = fidelity(&student, &teacher)?;
    let gradcheck_max_rel_error = if args.gradcheck {
        if student.len() > GRADCHECK_MAX_ELEMENTS {
            return Err(CliError::input(format!(
                "--gradcheck is limited to tensors of at most {GRADCHECK_MAX_ELEMENTS} \
                 elements, got {}",
                student.len()
            )));
        }
        Some(gradient_check_max_rel_error(&student, &teacher, &weights)?)
    } else {
        None
    };
    let report = Report {
        loss,
        fidelity: fid,
        fidelity_band: BandCheck {
            min_cosine: GOOD_COSINE_MIN,
            scale_range: GOOD_SCALE_RANGE,
            pass: fid.within_default_band(),
        },
        gradcheck_max_rel_error,
    };
    emit(manifest, report, ctx.out.as_deref())
}
