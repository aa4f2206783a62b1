//! Experiment runner, expression pipeline and file formats on top of
//! [`mlsbm_core`].
//!
//! * [`config`]: presets and the `key = value` experiment format.
//! * [`experiment`]: seeded grid sweeps, result records and summaries.
//! * [`figures`]: one entry point per reproduced figure.
//! * [`network`]: expression tables to a filtered co-expression network.
//! * [`plot`]: CSV columns to a deterministic SVG line chart.
#![warn(missing_debug_implementations, rust_2018_idioms)]

pub mod config;
mod error;
pub mod experiment;
pub mod figures;
pub mod network;
pub mod plot;

pub use error::{Error, Result};
pub use mlsbm_core as core;
