//! Library side of the `umbilic` command: input files, verification suites
//! and report formats. The binary in `main.rs` only parses arguments.

pub mod error;
pub mod input;
pub mod report;
pub mod suites;

pub use error::{CliError, ExitStatus};

/// Version string recorded in report environments.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;
