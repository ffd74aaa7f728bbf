//! File formats, configuration and the experiment runner behind the
//! `convergence-lab` binary.

pub mod config;
pub mod format;
pub mod runner;

pub use config::{load_config, validate_config, ConfigError, Diagnostic, ExperimentConfig};
pub use runner::{run, Outcome, RunError, Task};
