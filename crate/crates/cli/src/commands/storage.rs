//! `storage`: annual embedding-bank footprint and raw-traffic
//! projection for a barn.

use clap::ValueEnum;
use pentrack_core::budget::{format_bytes, UnitMode};
use pentrack_core::reid::{
    annual_footprint, raw_traffic_and_reduction, AnnualFootprint, Precision, StoragePolicy,
    TrafficSummary,
};
use serde::Serialize;

use crate::commands::Ctx;
use crate::error::CliResult;
use crate::manifest::{emit, emit_manifest_only, RunManifest};

/// Hours in a non-leap year: 365 x 24.
const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Half16,
    Single32,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Half16 => Precision::Half16,
            PrecisionArg::Single32 => Precision::Single32,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 200)]
    pub animals: u64,
    /// Bank update cadence in hours.
    #[arg(long, default_value_t = 1.0)]
    pub cadence_h: f64,
    /// Embedding dimension.
    #[arg(long, default_value_t = 384)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Half16)]
    pub precision: PrecisionArg,
    /// Per-entry metadata, decimal kB.
    #[arg(long, default_value_t = 10.0)]
    pub metadata_kb: f64,
    /// Frame rate for the raw-traffic projection.
    #[arg(long, default_value_t = 5.0)]
    pub fps: f64,
}

#[derive(Serialize)]
struct Report {
    policy: StoragePolicy,
    cadence_s: f64,
    annual: AnnualFootprint,
    annual_display: AnnualDisplay,
    traffic: TrafficSummary,
    traffic_display: String,
}

#[derive(Serialize)]
struct AnnualDisplay {
    raw_embedding: String,
    per_animal: String,
    barn_total: String,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let precision: Precision = args.precision.into();
    let policy = StoragePolicy {
        cadence_entries_per_year: (HOURS_PER_YEAR / args.cadence_h).round() as u64,
        bytes_per_embedding: precision.embedding_bytes(args.dim),
        metadata_bytes_per_entry: (args.metadata_kb * 1000.0).round() as u64,
        animals: args.animals,
        fps: args.fps,
    };
    policy.validate()?;
    let cadence_s = args.cadence_h * 3600.0;
    let manifest = RunManifest::new(
        "storage",
        serde_json::json!({
            "policy": policy,
            "cadence_h": args.cadence_h,
            "dim": args.dim,
        }),
    );
    if ctx.manifest_only {
        return emit_manifest_only(manifest, ctx.out.as_deref());
    }

    let annual = annual_footprint(&policy);
    let traffic = raw_traffic_and_reduction(&policy, cadence_s)?;
    let report = Report {
        policy,
        cadence_s,
        annual,
        annual_display: AnnualDisplay {
            raw_embedding: format_bytes(annual.raw_embedding_bytes, UnitMode::Decimal),
            per_animal: format_bytes(annual.total_bytes_per_animal, UnitMode::Decimal),
            barn_total: format_bytes(annual.barn_total_bytes, UnitMode::Decimal),
        },
        traffic_display: format!(
            "{}/day per animal before aggregation, {}x reduction at cadence",
            format_bytes(traffic.bytes_per_animal_per_day as u64, UnitMode::Decimal),
            traffic.reduction_factor
        ),
        traffic,
    };
    emit(manifest, report, ctx.out.as_deref())
}
