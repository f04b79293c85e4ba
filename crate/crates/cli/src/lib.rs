//! Command-line front end for `toricgm`: JSON model, basis, distribution
//! and count files in, one JSON run report out.

pub mod commands;
pub mod formats;

use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<toricgm::Error> for CliError {
    fn from(e: toricgm::Error) -> Self {
        let code = match e {
            toricgm::Error::BudgetExceeded { .. } => EXIT_BUDGET,
            toricgm::Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
            _ => EXIT_VALIDATION,
        };
        CliError { code, message: e.to_string() }
    }
}

/// What every command prints. Identical inputs give identical reports
/// except for `timing_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<T> {
    pub command: String,
    pub inputs_digest: String,
    pub results: T,
    pub timing_ms: f64,
    pub version: String,
}

/// Reads input files and hashes them, each tagged by its flag, in the
/// order they are read.
pub struct Inputs {
    hasher: Sha256,
    started: Instant,
}

impl Default for Inputs {
    fn default() -> Self {
        Inputs { hasher: Sha256::new(), started: Instant::now() }
    }
}

impl Inputs {
    pub fn read(&mut self, flag: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        self.hasher.update(flag.as_bytes());
        self.hasher.update([0]);
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        Ok(bytes)
    }

    /// Folds a non-file option into the digest.
    pub fn option(&mut self, flag: &str, value: &str) {
        self.hasher.update(flag.as_bytes());
        self.hasher.update([0]);
        self.hasher.update((value.len() as u64).to_le_bytes());
        self.hasher.update(value.as_bytes());
    }

    pub fn finish<T>(self, command: &str, results: T) -> RunReport<T> {
        let digest: String = self.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        let ms = self.started.elapsed().as_secs_f64() * 1e3;
        RunReport {
            command: command.into(),
            inputs_digest: digest,
            results,
            timing_ms: (ms * 1e3).round() / 1e3,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}
