//! Command-line front end for `crnosc`: analysis reports, enumeration,
//! simulation output and the reproduction suite.

pub mod analyze;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod io;
pub mod report;
pub mod verify;

pub use error::CliError;

/// JSON schema that every analysis report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");
