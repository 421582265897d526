//! File formats, reports and the command-line pipeline around
//! `ixdrl-core`.
//!
//! * [`format`]: JSON Lines trace files.
//! * [`tables`]: interestingness and feature CSVs.
//! * [`charts`] and [`svg`]: static radar, time-series, beeswarm and
//!   waterfall plots, each with the CSV it was drawn from.
//! * [`pipeline`]: stage functions, config, and the hashed artifact
//!   manifest.

pub mod charts;
pub mod format;
pub mod pipeline;
pub mod svg;
pub mod tables;

pub use format::{load_traceset, parse_traceset, save_traceset, traceset_to_string, FormatError};
pub use pipeline::{run_pipeline, CliError, Manifest, PipelineConfig};
