//! File formats, configuration and batch commands around `robie-core`.
//!
//! Every command reads its inputs fully, computes its outputs in memory and
//! only then writes them, each through a temporary file and a rename.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;

pub use config::PipelineConfig;
pub use error::CliError;
