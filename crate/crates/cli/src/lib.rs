//! Batch experiment runner around `wql-core`: flat config files in, CSV tables
//! and SVG charts out.

pub mod config;
pub mod run;
pub mod svg;

pub use config::{parse_config, ConfigError, ExperimentConfig, Mode};
pub use run::{run, RunError, REPORT_COLUMNS};
