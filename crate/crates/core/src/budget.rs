//! Compression-ratio, checkpoint-size, and device-memory-budget
//! arithmetic.
//!
//! Sizes are computed in exact bytes; presentation units are explicit
//! because published figures mix conventions — storage arithmetic tends
//! to be decimal (MB = 10^6 B) while weight-file sizes usually match
//! binary units (MiB = 2^20 B).

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Decimal (kB/MB/GB = 10^3/10^6/10^9) or binary (KiB/MiB/GiB = 2^10/2^20/2^30).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum UnitMode {
    #[default]
    Decimal,
    Binary,
}

impl UnitMode {
    pub fn kilo(&self) -> f64 {
        match self {
            UnitMode::Decimal => 1e3,
            UnitMode::Binary => 1024.0,
        }
    }

    pub fn mega(&self) -> f64 {
        self.kilo() * self.kilo()
    }

    pub fn giga(&self) -> f64 {
        self.kilo() * self.mega()
    }

    fn suffixes(&self) -> [&'static str; 4] {
        match self {
            UnitMode::Decimal => ["B", "kB", "MB", "GB"],
            UnitMode::Binary => ["B", "KiB", "MiB", "GiB"],
        }
    }
}

/// Render a byte count in the largest unit that keeps the value >= 1,
/// with two decimals. Display-side rounding only; keep arithmetic in
/// bytes.
pub fn format_bytes(bytes: u64, mode: UnitMode) -> String {
    let k = mode.kilo();
    let mut value = bytes as f64;
    let mut idx = 0;
    while value >= k && idx < 3 {
        value /= k;
        idx += 1;
    }
    let rounded = math::round(value * 100.0) / 100.0;
    alloc::format!("{rounded} {}", mode.suffixes()[idx])
}

/// One model component: a parameter count and its serialized precision.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentSpec {
    pub name: String,
    pub parameter_count: u64,
    /// 2 for half precision, 4 for single precision.
    pub bytes_per_parameter: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub activation_budget_bytes: Option<u64>,
}

impl ComponentSpec {
    pub fn new(
        name: impl Into<String>,
        parameter_count: u64,
        bytes_per_parameter: f64,
    ) -> Result<Self> {
        if parameter_count == 0 {
            return Err(Error::InvalidConfig(
                "parameter_count must be positive".into(),
            ));
        }
        if !(bytes_per_parameter > 0.0 && bytes_per_parameter.is_finite()) {
            return Err(Error::InvalidConfig(
                "bytes_per_parameter must be positive".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            parameter_count,
            bytes_per_parameter,
            activation_budget_bytes: None,
        })
    }
}

/// Teacher-to-student parameter ratio.
pub fn compression_ratio(teacher_params: f64, student_params: f64) -> Result<f64> {
    if !(student_params > 0.0) {
        return Err(Error::DegenerateInput(
            "student parameter count must be positive".into(),
        ));
    }
    Ok(teacher_params / student_params)
}

/// On-disk weight size in exact bytes: parameters x bytes per parameter.
pub fn checkpoint_size(c: &ComponentSpec) -> u64 {
    math::round(c.parameter_count as f64 * c.bytes_per_parameter) as u64
}

/// One line of a device memory budget. Upper-bound allowances carry
/// their justification in `provenance_note`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BudgetLine {
    pub name: String,
    pub vram_gb: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub provenance_note: Option<String>,
}

impl BudgetLine {
    pub fn new(name: impl Into<String>, vram_gb: f64) -> Result<Self> {
        if !(vram_gb >= 0.0 && vram_gb.is_finite()) {
            return Err(Error::InvalidConfig("vram_gb must be nonnegative".into()));
        }
        Ok(Self {
            name: name.into(),
            vram_gb,
            provenance_note: None,
        })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.provenance_note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BudgetReport {
    pub lines: Vec<BudgetLine>,
    pub total_gb: f64,
    pub envelope_gb: f64,
    pub headroom_gb: f64,
    pub over_budget: bool,
}

/// Sum the lines against a device envelope. Negative headroom is
/// reported as-is with `over_budget` set.
pub fn budget_report(lines: Vec<BudgetLine>, envelope_gb: f64) -> Result<BudgetReport> {
    if !(envelope_gb > 0.0 && envelope_gb.is_finite()) {
        return Err(Error::InvalidConfig("envelope_gb must be positive".into()));
    }
    let total_gb: f64 = lines.iter().map(|l| l.vram_gb).sum();
    let headroom_gb = envelope_gb - total_gb;
    Ok(BudgetReport {
        lines,
        total_gb,
        envelope_gb,
        headroom_gb,
        over_budget: headroom_gb < 0.0,
    })
}
