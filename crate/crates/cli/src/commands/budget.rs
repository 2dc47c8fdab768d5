//! `budget`: sum memory-budget lines against a device envelope. JSON on
//! stdout, an aligned table on stderr.

use std::path::PathBuf;

use pentrack_core::budget::{budget_report, BudgetLine, BudgetReport};
use serde::Deserialize;

use crate::commands::Ctx;
use crate::error::{CliError, CliResult};
use crate::manifest::{emit, emit_manifest_only, RunManifest};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Device envelope, GB.
    #[arg(long)]
    pub envelope: f64,
    /// JSON list of budget lines: [{"name", "vram_gb", "note"?}, ...].
    #[arg(long)]
    pub lines: PathBuf,
}

#[derive(Deserialize)]
struct LineInput {
    name: String,
    vram_gb: f64,
    #[serde(default)]
    note: Option<String>,
}

fn render_table(report: &BudgetReport) -> String {
    let width = report
        .lines
        .iter()
        .map(|l| l.name.len())
        .chain(["Total budgeted".len(), "Remaining headroom".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for line in &report.lines {
        let note = line
            .provenance_note
            .as_deref()
            .map(|n| format!("  ({n})"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{:<width$}  {:>8.2} GB{note}\n",
            line.name, line.vram_gb
        ));
    }
    out.push_str(&format!(
        "{:<width$}  {:>8.2} GB\n",
        "Total budgeted", report.total_gb
    ));
    out.push_str(&format!(
        "{:<width$}  {:>8.2} GB\n",
        "Envelope", report.envelope_gb
    ));
    out.push_str(&format!(
        "{:<width$}  {:>8.2} GB{}\n",
        "Remaining headroom",
        report.headroom_gb,
        if report.over_budget {
            "  OVER BUDGET"
        } else {
            ""
        }
    ));
    out
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let mut manifest = RunManifest::new(
        "budget",
        serde_json::json!({
            "envelope_gb": args.envelope,
            "lines": args.lines.display().to_string(),
        }),
    );
    manifest.digest_input(&args.lines)?;
    if ctx.manifest_only {
        return emit_manifest_only(manifest, ctx.out.as_deref());
    }

    let raw = std::fs::read_to_string(&args.lines)
        .map_err(|e| CliError::input(format!("{}: {e}", args.lines.display())))?;
    let inputs: Vec<LineInput> = serde_json::from_str(&raw)
        .map_err(|e| CliError::input(format!("{}: {e}", args.lines.display())))?;
    let lines: Vec<BudgetLine> = inputs
        .into_iter()
        .map(|l| {
            let line = BudgetLine::new(l.name, l.vram_gb)?;
            Ok(match l.note {
                Some(note) => line.with_note(note),
                None => line,
            })
        })
        .collect::<CliResult<_>>()?;
    let report = budget_report(lines, args.envelope)?;
    eprint!("{}", render_table(&report));
    emit(manifest, report, ctx.out.as_deref())
}
