//! Text formats and subcommands of the `contcalc` tool.

pub mod commands;
pub mod error;
pub mod formats;
pub mod text;

pub use error::CliError;
