//! Command-line front end: config files, sweeps, table output and the
//! acceptance checks.

pub mod acceptance;
pub mod config;
pub mod emit;
mod error;
pub mod sweep;

pub use error::CliError;
