//! Algorithmic core for an edge livestock-monitoring pipeline.
//!
//! Everything in this crate is pure computation over in-memory values:
//! bounding-box geometry, minimum-cost assignment, CLEAR-MOT and identity
//! metrics, confusion-matrix reports, the four-term feature-distillation
//! loss with its analytic gradient and fidelity diagnostics, the tracker
//! session memory model with sliding-window pruning, the embedding-pool
//! re-identification state machine with its storage sizing, device memory
//! budget arithmetic, and a deterministic synthetic tracking-scenario
//! harness that ties the pieces together.
//!
//! The crate is `no_std`-compatible (allocation required). Without the
//! `std` feature, enable the `libm` feature to supply float math.
//! File formats, persistence, and the CLI live in the companion
//! `pentrack-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]
// Validation predicates are written as `!(x > 0.0)` so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("pentrack-core requires either the `std` or the `libm` feature");

pub mod assignment;
pub mod budget;
pub mod cls;
pub mod distill;
pub mod error;
pub mod geometry;
mod math;
pub mod mot;
pub mod reid;
pub mod rng;
pub mod session;
pub mod sim;

pub use error::{Error, Result};
