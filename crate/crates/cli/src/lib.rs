//! Batch front end for the `respat` resilience-pattern models: config
//! parsing, analytic evaluation, simulation, sweeps, and comparison reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

pub use commands::{check_mapping, cmd_compare, cmd_eval, cmd_simulate, RunOptions};
pub use config::{parse_config, ConfigDocument};
pub use error::CliError;
pub use report::{Cell, Format, ReportDocument};
