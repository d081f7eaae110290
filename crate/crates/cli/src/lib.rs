//! Command line driver: presets, configuration layering, output files and the
//! Burgers convergence study.

pub mod app;
pub mod config;
pub mod convergence;
pub mod error;
pub mod output;
pub mod presets;

pub use app::{run_convergence, run_preset, RunSummary};
pub use config::{resolve, ConfigLayer, RunConfig};
pub use error::CliError;
