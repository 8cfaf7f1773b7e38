//! Command-line front end: scenario files, sweeps and plot-ready output.

pub mod commands;
pub mod config;
mod error;
pub mod output;

pub use error::CliError;
