//! Command-line surface for the Ree(q) recognition kernel: file formats
//! and subcommand implementations, exposed as a library so integration
//! tests can drive them directly.
//!
//! Exit codes: 0 success, 1 negative answer (not in the group / not
//! Ree(q)), 2 Las Vegas budget failure, 3 I/O or format error.

pub mod commands;
pub mod format;

/// An error carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ree_core::Error> for CliError {
    fn from(e: ree_core::Error) -> CliError {
        let code = match e {
            ree_core::Error::NotInGroup(_) => 1,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}
