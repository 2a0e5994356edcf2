//! Command-line front end: family documents, parameter specs, the cache
//! file format and the subcommands.

pub mod cachefile;
pub mod commands;
pub mod error;
pub mod gamma;
pub mod spec;

pub use error::{CliError, CliResult};
