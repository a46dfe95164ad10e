//! Experiment runner over the scatterlab core: declarative flat-text
//! configs, deterministic grid sweeps, log-log rate fits, and byte-stable
//! CSV/JSON reports.

pub mod config;
pub mod experiments;
pub mod fit;
pub mod report;

pub use config::Config;
pub use experiments::{run, ExperimentKind};
pub use report::{Report, VerdictRow};
