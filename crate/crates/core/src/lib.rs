//! Competence analytics for reinforcement-learning agents.
//!
//! The crate turns recorded interaction traces into per-timestep
//! interestingness values in `[-1, 1]`, groups whole traces by their
//! interestingness signature, and attributes interestingness to task
//! features with boosted regression trees and Shapley values.
//!
//! Everything here is pure computation over in-memory data and builds
//! without `std`; file formats, plots and the command line live in the
//! companion `ixdrl` crate.
//!
//! Module map:
//!
//! * [`trace`]: interaction-data schema and validation.
//! * [`rollout`]: tabular toy environments and agents that produce traces.
//! * [`analyzers`]: the seven interestingness dimensions and profiles.
//! * [`clustering`]: complete-linkage trace clustering and silhouette scoring.
//! * [`attribution`]: gradient-boosted trees, Shapley attribution, outlier steps.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(feature = "parallel")]
extern crate std;

pub mod analyzers;
pub mod attribution;
pub mod clustering;
pub mod math;
pub mod rollout;
pub mod stats;
pub mod trace;

pub use analyzers::{
    analyze, interestingness_profile, AnalyzerConfig, Dimension, InterestingnessRecord, SeriesKey,
};
pub use trace::{InteractionDatapoint, Trace, TraceSet, ValidationError};
