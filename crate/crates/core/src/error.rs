//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Convenience alias used by every fallible operation in the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands were required to have identical shape and did not.
    DimMismatch { expected: String, got: String },
    /// An input was numerically degenerate (zero norm, zero spread)
    /// where a division by it was required.
    DegenerateInput(String),
    /// A configuration value violated its documented constraints.
    InvalidConfig(String),
    /// Record streams for a single frame carried mixed frame indices.
    MixedFrameIndices { expected: u64, got: u64 },
    /// A track set contained two records for the same (frame, identity).
    DuplicateRecord { frame: u64, identity: u64 },
    /// A session step used a frame index at or below one already cached.
    NonMonotonicFrame { last: u64, got: u64 },
    /// Ground truth was empty where at least one record is required.
    EmptyGroundTruth,
    /// The brute-force assignment oracle was asked to exceed its
    /// dimension limit; this signals a misconfigured test.
    DimensionLimit { limit: usize, got: usize },
    /// Scenario boxes cannot be placed inside the arena.
    OvercrowdedArena(String),
    /// A re-identification bank required for an observation was missing
    /// or empty.
    EmptyBank { identity: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DegenerateInput(what) => write!(f, "degenerate input: {what}"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::MixedFrameIndices { expected, got } => {
                write!(
                    f,
                    "mixed frame indices in one frame batch: expected {expected}, got {got}"
                )
            }
            Error::DuplicateRecord { frame, identity } => {
                write!(f, "duplicate record for frame {frame}, identity {identity}")
            }
            Error::NonMonotonicFrame { last, got } => {
                write!(f, "non-monotonic frame index: {got} after {last}")
            }
            Error::EmptyGroundTruth => write!(f, "ground truth contains no records"),
            Error::DimensionLimit { limit, got } => {
                write!(
                    f,
                    "brute-force solver limited to {limit} rows/cols, got {got}"
                )
            }
            Error::OvercrowdedArena(what) => write!(f, "overcrowded arena: {what}"),
            Error::EmptyBank { identity } => {
                write!(
                    f,
                    "embedding bank for identity {identity} is missing or empty"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
