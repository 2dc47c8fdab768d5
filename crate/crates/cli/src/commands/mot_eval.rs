//! `mot-eval`: tracking metrics from a ground-truth and prediction
//! track CSV pair.

use std::path::PathBuf;

use clap::ValueEnum;
use pentrack_core::geometry::DistanceMode;
use pentrack_core::mot::{evaluate_sequence, MotConfig};

use crate::commands::Ctx;
use crate::error::CliResult;
use crate::formats::track_csv::read_track_set;
use crate::manifest::{emit, emit_manifest_only, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MotpMode {
    Center,
    OneMinusIou,
}

impl From<MotpMode> for DistanceMode {
    fn from(mode: MotpMode) -> Self {
        match mode {
            MotpMode::Center => DistanceMode::Center,
            MotpMode::OneMinusIou => DistanceMode::OneMinusIou,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Ground-truth track CSV.
    pub gt: PathBuf,
    /// Predicted track CSV.
    pub pred: PathBuf,
    /// IoU gate for matching.
    #[arg(long, default_value_t = 0.5)]
    pub iou: f64,
    /// Distance averaged into MOTP.
    #[arg(long, value_enum, default_value_t = MotpMode::Center)]
    pub motp: MotpMode,
    /// Mostly-tracked coverage threshold.
    #[arg(long, default_value_t = 0.8)]
    pub mt_threshold: f64,
    /// Mostly-lost coverage threshold.
    #[arg(long, default_value_t = 0.2)]
    pub ml_threshold: f64,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let config = MotConfig {
        iou_gate: args.iou,
        distance_mode: args.motp.into(),
        mt_threshold: args.mt_threshold,
        ml_threshold: args.ml_threshold,
    };
    let mut manifest = RunManifest::new(
        "mot-eval",
        serde_json::json!({
            "gt": args.gt.display().to_string(),
            "pred": args.pred.display().to_string(),
            "mot": config,
        }),
    );
    manifest.digest_input(&args.gt)?;
    manifest.digest_input(&args.pred)?;
    if ctx.manifest_only {
        return emit_manifest_only(manifest, ctx.out.as_deref());
    }
    let gt = read_track_set(&args.gt)?;
    let pred = read_track_set(&args.pred)?;
    let summary = evaluate_sequence(&gt, &pred, &config)?;
    emit(manifest, summary, ctx.out.as_deref())
}
