use std::fmt;

use umbilic_core::GeomError;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    Failure = 1,
    InputError = 2,
    Degenerate = 3,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }

    /// Failure dominates degeneracy, which dominates a pass.
    pub fn combine(self, other: ExitStatus) -> ExitStatus {
        use ExitStatus::*;
        match (self, other) {
            (Failure, _) | (_, Failure) => Failure,
            (InputError, _) | (_, InputError) => InputError,
            (Degenerate, _) | (_, Degenerate) => Degenerate,
            _ => Pass,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input: exit code 2.
    Input(String),
    /// Nothing to check on this manifold: exit code 3.
    Degenerate(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Input(_) => ExitStatus::InputError,
            CliError::Degenerate(_) => ExitStatus::Degenerate,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Unsupported(m) => CliError::Degenerate(m),
            GeomError::Degenerate(m) => CliError::Degenerate(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
