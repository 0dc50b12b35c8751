//! Experiment runner for random Lindblad decoherence studies.

pub mod config;
pub mod experiments;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{Diagnostic, ExperimentConfig};
pub use runner::{load_config, run, Overrides, RunError, RunOutcome};
