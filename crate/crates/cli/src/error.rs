use dirac_forge_core::ParseError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{0}")]
    Schema(String),
    #[error("entry ({row}, {col}) {text:?}: {error}")]
    Entry { row: usize, col: usize, text: String, error: ParseError },
    #[error("backend: {0}")]
    Backend(dirac_forge_core::Error),
}

/// Exit codes, also used to rank outcomes: a higher rank wins when several
/// specs are run together.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SPEC_ERROR: i32 = 2;
pub const EXIT_BACKEND_ERROR: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Backend(_) => EXIT_BACKEND_ERROR,
            _ => EXIT_SPEC_ERROR,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Schema(_) => "schema",
            CliError::Entry { .. } => "parse",
            CliError::Backend(_) => "backend",
        }
    }
}

/// Precedence when combining outcomes: spec errors, then backend errors, then check failures.
pub fn combine_exit(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        EXIT_SPEC_ERROR => 3,
        EXIT_BACKEND_ERROR => 2,
        EXIT_CHECK_FAILED => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_errors_outrank_backend_errors() {
        assert_eq!(combine_exit(EXIT_BACKEND_ERROR, EXIT_SPEC_ERROR), EXIT_SPEC_ERROR);
        assert_eq!(combine_exit(EXIT_SPEC_ERROR, EXIT_BACKEND_ERROR), EXIT_SPEC_ERROR);
        assert_eq!(combine_exit(EXIT_CHECK_FAILED, EXIT_BACKEND_ERROR), EXIT_BACKEND_ERROR);
        assert_eq!(combine_exit(EXIT_PASS, EXIT_CHECK_FAILED), EXIT_CHECK_FAILED);
    }
}
