//! `prune-sim`: drive the session memory model and emit either a JSON
//! summary or the per-frame trace as CSV.

use std::io::Write;

use pentrack_core::session::{
    pruned_trace_bound, simulate_stream_with, time_to_budget, MemoryModelParams, PruneConfig,
};
use serde::Serialize;

use crate::commands::Ctx;
use crate::error::CliResult;
use crate::manifest::{emit, emit_manifest_only, RunManifest};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Tracked objects.
    #[arg(long, default_value_t = 8)]
    pub objects: u64,
    /// Per-frame per-object cache growth, decimal MB.
    #[arg(long, default_value_t = 5.6)]
    pub per_frame_mb: f64,
    /// Stream length in frames.
    #[arg(long, default_value_t = 600)]
    pub frames: u64,
    /// Non-conditioning entries kept per object.
    #[arg(long, default_value_t = 8)]
    pub keep: usize,
    /// Frames between prune passes.
    #[arg(long, default_value_t = 25)]
    pub interval: u64,
    /// Fixed session overhead, decimal MB.
    #[arg(long, default_value_t = 0.0)]
    pub base_mb: f64,
    /// Stream rate used for the exhaustion projection.
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    /// Device budget, decimal GB.
    #[arg(long, default_value_t = 16.0)]
    pub budget_gb: f64,
    /// Disable pruning (the default session behaviour).
    #[arg(long)]
    pub no_prune: bool,
    /// Emit the per-frame trace as `frame,bytes` CSV instead of the
    /// JSON summary (the manifest then goes to stderr).
    #[arg(long)]
    pub csv: bool,
}

#[derive(Serialize)]
struct Report {
    params: MemoryModelParams,
    prune: PruneConfig,
    frames: u64,
    final_bytes: u64,
    peak_bytes: u64,
    /// Closed-form trace ceiling; only meaningful with pruning on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pruned_bound_bytes: Option<u64>,
    /// keep_last x entry size: the per-object cache at steady state.
    steady_state_per_object_bytes: u64,
    /// Seconds for the unpruned linear model to exhaust the budget.
    unpruned_exhaustion_seconds: f64,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let params = MemoryModelParams {
        per_frame_per_object_mb: args.per_frame_mb,
        base_mb: args.base_mb,
        num_objects: args.objects,
        fps: args.fps,
        budget_gb: args.budget_gb,
    };
    let prune = PruneConfig {
        keep_last: args.keep,
        interval: args.interval,
        enabled: !args.no_prune,
    };
    let manifest = RunManifest::new(
        "prune-sim",
        serde_json::json!({
            "params": params,
            "prune": prune,
            "frames": args.frames,
            "csv": args.csv,
        }),
    );
    if ctx.manifest_only {
        return emit_manifest_only(manifest, ctx.out.as_deref());
    }

    let trace = simulate_stream_with(&params, args.frames, &prune)?;
    if args.csv {
        eprintln!("{}", serde_json::to_string(&manifest)?);
        let mut body = String::from("frame,bytes\n");
        for (frame, bytes) in &trace {
            body.push_str(&format!("{frame},{bytes}\n"));
        }
        match &ctx.out {
            Some(path) => std::fs::write(path, body)?,
            None => {
                std::io::stdout().write_all(body.as_bytes())?;
            }
        }
        return Ok(());
    }

    let report = Report {
        params,
        prune,
        frames: args.frames,
        final_bytes: trace.last().map(|p| p.1).unwrap_or(0),
        peak_bytes: trace.iter().map(|p| p.1).max().unwrap_or(0),
        pruned_bound_bytes: prune.enabled.then(|| pruned_trace_bound(&params, &prune)),
        steady_state_per_object_bytes: prune.keep_last as u64 * params.entry_bytes(),
        unpruned_exhaustion_seconds: time_to_budget(&params)?,
    };
    emit(manifest, report, ctx.out.as_deref())
}
