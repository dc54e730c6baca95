//! Output modes and exit-code policy.
//!
//! Structured mode prints exactly one canonical record (sorted keys, reduced
//! rationals, newline-terminated) so identical inputs give byte-identical
//! outputs. Text mode is for humans and may add timing and digests.
//!
//! Exit codes: 0 success, 2 input error, 3 precondition failure,
//! 4 assertion failure, 5 internal verification failure.

use pucalc_core::records::canonical_string;
use pucalc_core::Error;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMode {
    Text,
    Structured,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError::new(2, message)
    }

    pub fn assertion(message: impl Into<String>) -> Self {
        CliError::new(4, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_) | Error::SeedRequired(_) => 2,
            Error::AlgebraMismatch { .. }
            | Error::GroupMismatch { .. }
            | Error::PreconditionFailed { .. }
            | Error::CapacityExceeded { .. } => 3,
            Error::VerificationFailed(_) => 5,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("io error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Emits a command result: the canonical record in structured mode, the
/// human-readable lines (plus a timing footer) in text mode.
pub fn emit(mode: OutputMode, record: &Value, text_lines: &[String], wall: std::time::Duration) {
    match mode {
        OutputMode::Structured => print!("{}", canonical_string(record)),
        OutputMode::Text => {
            for line in text_lines {
                println!("{line}");
            }
            println!("wall: {} ms", wall.as_millis());
        }
    }
}

/// Hex digest of the raw input bytes, shown in text mode.
pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
