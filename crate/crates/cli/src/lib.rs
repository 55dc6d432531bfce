//! Command line, polynomial input grammar and JSON/CSV output for
//! `coopbasis-core`.

pub mod commands;
pub mod format;
pub mod parse;
pub mod render;

pub use commands::{run, Cli, CliError, Outcome};
