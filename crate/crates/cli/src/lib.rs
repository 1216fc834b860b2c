//! File formats and subcommands for the `dimer` tool.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod report;
pub mod verify;

pub use error::{CliError, CliResult};
