//! `reid-sim`: run the re-identification harness (or a sensitivity
//! sweep) over a scenario config file.

use std::path::{Path, PathBuf};

use pentrack_core::reid::{Precision, ReidConfig};
use pentrack_core::sim::{
    generate, run_pipeline_full, sensitivity_sweep, ScenarioConfig, SweepGrid,
};
use serde::Serialize;

use crate::commands::Ctx;
use crate::error::{CliError, CliResult};
use crate::formats::{bank::save_bank, embedding::write_embeddings, track_csv::write_track_set};
use crate::manifest::{emit, emit_manifest_only, RunManifest};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Scenario configuration (JSON).
    pub scenario: PathBuf,
    #[arg(long)]
    pub tau_low: Option<f64>,
    #[arg(long)]
    pub tau_high: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub cadence_s: Option<f64>,
    /// Override the scenario's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Frames used to seed the banks from true associations.
    #[arg(long, default_value_t = 5)]
    pub warmup: u64,
    /// Sweep grid, e.g. `tau-low=0.6,0.65;tau-high=0.75,0.8;cadence-s=3600`.
    /// Omitted axes keep the base value.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Write the corrected track stream as track CSV (single run only).
    #[arg(long)]
    pub dump_corrected: Option<PathBuf>,
    /// Write the scenario's embedding stream as an EMB1 file, in
    /// (frame, identity) order (single run only).
    #[arg(long)]
    pub dump_embeddings: Option<PathBuf>,
    /// Write one bank JSON per identity into this directory (single run
    /// only).
    #[arg(long)]
    pub emit_banks: Option<PathBuf>,
}

fn parse_grid(spec: &str) -> CliResult<SweepGrid> {
    let mut grid = SweepGrid::default();
    for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
        let (key, values) = part.split_once('=').ok_or_else(|| {
            CliError::input(format!("bad sweep axis `{part}`, expected key=v1,v2"))
        })?;
        let parsed: Result<Vec<f64>, _> =
            values.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let parsed =
            parsed.map_err(|_| CliError::input(format!("bad sweep values in `{part}`")))?;
        if parsed.is_empty() {
            return Err(CliError::input(format!("empty sweep axis `{key}`")));
        }
        match key.trim() {
            "tau-low" | "tau_low" => grid.tau_low = parsed,
            "tau-high" | "tau_high" => grid.tau_high = parsed,
            "cadence-s" | "cadence_s" => grid.cadence_s = parsed,
            other => {
                return Err(CliError::input(format!(
                    "unknown sweep axis `{other}` (use tau-low, tau-high, cadence-s)"
                )))
            }
        }
    }
    Ok(grid)
}

#[derive(Serialize)]
struct SweepReport {
    points: usize,
    sweep: Vec<pentrack_core::sim::SweepPoint>,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let raw = std::fs::read_to_string(&args.scenario)
        .map_err(|e| CliError::input(format!("{}: {e}", args.scenario.display())))?;
    let mut scenario_cfg: ScenarioConfig = serde_json::from_str(&raw)
        .map_err(|e| CliError::input(format!("{}: {e}", args.scenario.display())))?;
    if let Some(seed) = args.seed {
        scenario_cfg.seed = seed;
    }
    scenario_cfg.validate()?;

    let defaults = ReidConfig::default();
    let reid = ReidConfig {
        tau_low: args.tau_low.unwrap_or(defaults.tau_low),
        tau_high: args.tau_high.unwrap_or(defaults.tau_high),
        alpha: args.alpha.unwrap_or(defaults.alpha),
        cadence_s: args.cadence_s.unwrap_or(defaults.cadence_s),
    };
    reid.validate()?;

    let mut manifest = RunManifest::new(
        "reid-sim",
        serde_json::json!({
            "scenario": scenario_cfg,
            "reid": reid,
            "warmup_frames": args.warmup,
            "sweep": args.sweep,
        }),
    )
    .with_seed(scenario_cfg.seed);
    manifest.digest_input(&args.scenario)?;
    if ctx.manifest_only {
        return emit_manifest_only(manifest, ctx.out.as_deref());
    }

    if let Some(spec) = &args.sweep {
        let grid = parse_grid(spec)?;
        let sweep = sensitivity_sweep(&scenario_cfg, &reid, &grid, args.warmup)?;
        let report = SweepReport {
            points: sweep.len(),
            sweep,
        };
        return emit(manifest, report, ctx.out.as_deref());
    }

    let scenario = generate(&scenario_cfg)?;
    let run = run_pipeline_full(&scenario, &reid, args.warmup)?;
    if let Some(path) = &args.dump_corrected {
        write_track_set(path, &run.corrected)?;
    }
    if let Some(path) = &args.dump_embeddings {
        let stream: Vec<_> = scenario.true_embeddings.values().cloned().collect();
        write_embeddings(path, &stream, Precision::Half16)?;
    }
    if let Some(dir) = &args.emit_banks {
        emit_banks(dir, &run.banks)?;
    }
    emit(manifest, run.report, ctx.out.as_deref())
}

fn emit_banks(dir: &Path, banks: &pentrack_core::reid::EmbeddingBanks) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    for (identity, bank) in banks.iter() {
        save_bank(&dir.join(format!("bank_{identity}.json")), bank)?;
    }
    Ok(())
}
