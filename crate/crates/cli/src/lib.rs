//! File formats, configuration and subcommands of the `kdv` tool.

pub mod commands;
pub mod config;
pub mod csv_report;
pub mod error;
pub mod field_io;
pub mod reference_cache;

pub use error::{CliError, CliResult};
