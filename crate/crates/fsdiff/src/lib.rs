//! Command-line front end and file formats for the Fisher-Snedecor diffusion
//! toolkit: path CSV, JSON reports, and a parallel replication driver.

pub mod cli;
pub mod error;
pub mod io;
pub mod replicate;
pub mod stats;

pub use error::{CliError, CliResult};

/// Version stamped into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
