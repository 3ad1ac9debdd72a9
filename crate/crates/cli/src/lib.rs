//! Command-line front end: experiment configs, seeded runs and artifact
//! emission on top of `zng-core`.

pub mod config;
pub mod run;

pub use config::{ConfigError, ExperimentConfig, MSpec, Mode};
pub use run::{run, Exit, Outcome};
