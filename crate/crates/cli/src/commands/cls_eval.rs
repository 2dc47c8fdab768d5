//! `cls-eval`: classification report and top confusions from a
//! confusion-matrix CSV.

use std::path::PathBuf;

use pentrack_core::cls::{report, top_confusions, ClassReport, Confusion};
use serde::Serialize;

use crate::commands::Ctx;
use crate::error::CliResult;
use crate::formats::confusion_csv::read_confusion_matrix;
use crate::manifest::{emit, emit_manifest_only, RunManifest};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Confusion-matrix CSV (`true\pred` header form).
    pub confusion: PathBuf,
    /// How many confusion pairs to report.
    #[arg(long, default_value_t = 5)]
    pub top_k: usize,
}

#[derive(Serialize)]
struct Report {
    classification: ClassReport,
    top_confusions: Vec<Confusion>,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let mut manifest = RunManifest::new(
        "cls-eval",
        serde_json::json!({
            "confusion": args.confusion.display().to_string(),
            "top_k": args.top_k,
        }),
    );
    manifest.digest_input(&args.confusion)?;
    if ctx.manifest_only {
        return emit_manifest_only(manifest, ctx.out.as_deref());
    }
    let cm = read_confusion_matrix(&args.confusion)?;
    let classification = report(&cm)?;
    let confusions = top_confusions(&cm, args.top_k);
    emit(
        manifest,
        Report {
            classification,
            top_confusions: confusions,
        },
        ctx.out.as_deref(),
    )
}
