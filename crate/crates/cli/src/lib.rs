//! Library surface of the `pentrack` CLI: subcommand implementations,
//! file formats, and run manifests. The binary in `main.rs` is a thin
//! argument-parsing shell over this.

pub mod commands;
pub mod error;
pub mod formats;
pub mod manifest;
