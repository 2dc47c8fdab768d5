//! Run manifests: every report embeds the resolved configuration,
//! input digests, tool version, and seed that produced it, so a run can
//! be reproduced from its own output. Reports are byte-stable across
//! re-runs except for the `created_utc` field.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub created_utc: String,
    /// Fully resolved configuration, defaults materialized.
    pub config: serde_json::Value,
    /// sha256 hex digest per input file.
    pub input_digests: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: serde_json::Value) -> Self {
        Self {
            tool: "pentrack",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            config,
            input_digests: BTreeMap::new(),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn digest_input(&mut self, path: &Path) -> CliResult<()> {
        let mut file = std::fs::File::open(path)
            .map_err(|e| crate::error::CliError::input(format!("{}: {e}", path.display())))?;
        let mut hasher = Sha256::new();
        let mut buf = [0_u8; 64 * 1024];
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
        }
        self.input_digests.insert(
            path.display().to_string(),
            format!("{:x}", hasher.finalize()),
        );
        Ok(())
    }
}

/// The standard output envelope: manifest plus report.
#[derive(Debug, Serialize)]
pub struct Envelope<R: Serialize> {
    pub manifest: RunManifest,
    pub report: R,
}

/// Serialize the envelope to pretty JSON, to stdout or to `--out`.
pub fn emit<R: Serialize>(manifest: RunManifest, report: R, out: Option<&Path>) -> CliResult<()> {
    let doc = serde_json::to_string_pretty(&Envelope { manifest, report })?;
    match out {
        Some(path) => std::fs::write(path, doc + "\n")?,
        None => println!("{doc}"),
    }
    Ok(())
}

/// Emit just the manifest (for `--manifest-only`).
pub fn emit_manifest_only(manifest: RunManifest, out: Option<&Path>) -> CliResult<()> {
    let doc = serde_json::to_string_pretty(&serde_json::json!({ "manifest": manifest }))?;
    match out {
        Some(path) => std::fs::write(path, doc + "\n")?,
        None => println!("{doc}"),
    }
    Ok(())
}
