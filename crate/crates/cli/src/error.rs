use std::fmt;
use std::path::Path;

use illusion_core::Error;

/// Failure of a command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an infeasible configuration (exit 1).
    Usage(String),
    /// Unreadable, missing or malformed input, or a failed write (exit 2).
    Data(String),
    /// A broken internal contract (exit 3).
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Contract(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        if err.kind() == std::io::ErrorKind::NotFound {
            CliError::Data(format!("file not found: {}", path.display()))
        } else {
            CliError::Data(format!("{}: {err}", path.display()))
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Contract(m) => write!(f, "internal error: {m}"),
        }
    }
}

/// Attaches the failing stage to a core error.
pub fn stage(name: &'static str) -> impl Fn(Error) -> CliError {
    move |e| match e {
        Error::Capacity(_) => CliError::Usage(format!("{name}: {e}")),
        Error::Parse { .. } => CliError::Data(format!("{name}: {e}")),
        Error::Contract(_) => CliError::Contract(format!("{name}: {e}")),
    }
}

/// Like [`stage`], but for validation of user-supplied settings, where any
/// rejection is a configuration error.
pub fn config(name: &'static str) -> impl Fn(Error) -> CliError {
    move |e| match e {
        Error::Parse { .. } => CliError::Data(format!("{name}: {e}")),
        _ => CliError::Usage(format!("{name}: {e}")),
    }
}
