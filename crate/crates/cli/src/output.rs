//! stdout writing that tolerates a closed pipe.

use std::io::{self, Write};

use crate::error::CliError;

/// Print one line to stdout. A closed pipe (the reader quit early) ends
/// the process quietly instead of panicking.
pub fn line(text: impl AsRef<str>) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    let wrote = writeln!(out, "{}", text.as_ref()).and_then(|()| out.flush());
    match wrote {
        Ok(()) => Ok(()),
        Err(err) if err.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(err) => Err(CliError::from(err)),
    }
}
