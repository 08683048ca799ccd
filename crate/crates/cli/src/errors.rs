use std::fmt;

/// CLI failure classes, mapped onto exit codes in `main`: validation
/// problems exit 2, runtime failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<whitelasso_core::Error> for CliError {
    fn from(e: whitelasso_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn runtime(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}

/// Input paths are checked before any computation starts.
pub fn require_input(path: &std::path::Path) -> CliResult<()> {
    if !path.is_file() {
        return Err(validation(format!("input file not found: {}", path.display())));
    }
    Ok(())
}

/// Output locations are checked before any computation starts.
pub fn require_writable(path: &std::path::Path) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            return Err(validation(format!(
                "output directory does not exist: {}",
                parent.display()
            )));
        }
    }
    Ok(())
}
