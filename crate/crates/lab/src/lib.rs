//! Scaling experiments for `semiperiodic-core`: configuration files, sweeps
//! over `h`, `R` or `delta`, log-log fits against predicted rates, reports,
//! caching and plots.

pub mod cache;
pub mod config;
pub mod data;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod report;

pub use crate::config::{ExperimentConfig, ExperimentKind};
pub use crate::error::LabError;
pub use crate::experiments::run_experiment;
pub use crate::report::ScalingReport;
