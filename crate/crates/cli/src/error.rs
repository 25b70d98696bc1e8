//! Exit-code aware error carrier for the command layer.

use std::fmt;
use std::fmt::Display;
use std::path::Path;

/// A command failure: either misuse of the interface (exit 2) or a failure
/// of the work itself (exit 1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(anyhow::Error),
}

/// Prefix a failure with the file it concerns. The library's error strings
/// carry their own causes, so the path is the only context worth adding.
pub fn with_path<T, E: Display>(result: Result<T, E>, path: &Path) -> Result<T, CliError> {
    result.map_err(|err| CliError::Domain(anyhow::anyhow!("{}: {err}", path.display())))
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            // `:#` folds the anyhow context chain into one line.
            CliError::Domain(err) => write!(f, "{err:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Domain(err)
    }
}

// Both flattened to their display strings: each already embeds its cause,
// and keeping the source chain would print the cause twice.

impl From<fex::Error> for CliError {
    fn from(err: fex::Error) -> Self {
        CliError::Domain(anyhow::anyhow!("{err}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Domain(anyhow::anyhow!("{err}"))
    }
}
