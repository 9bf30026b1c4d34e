//! Batch runner: JSON configs in, CSV tables, SVG plots and a digest
//! manifest out.

pub mod compare;
pub mod config;
pub mod csv;
pub mod explain;
pub mod manifest;
pub mod plot;
pub mod run;

use thiserror::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Overrides the default output root `runs/`.
pub const OUT_ROOT_ENV: &str = "CBESOV_OUT_ROOT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    /// A numerical operation refused; the message names it.
    #[error("numerical refusal: {0}")]
    Numerical(String),
    #[error("comparison failed: {0}")]
    Comparison(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Comparison(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
