//! Command-line front end: run configuration, text snapshots, initial data
//! loading and the `run`, `verify-kernel`, `check-lemmas` and `diagnose`
//! commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod initial;
pub mod snapshot;

pub use error::{CliError, CliResult};
