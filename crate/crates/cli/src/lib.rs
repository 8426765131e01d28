//! Command-line front end for the `spiroplanck` library: file formats,
//! configuration, plots and the subcommands themselves.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod manifest;
pub mod svg;

pub use error::{CliError, Result};
