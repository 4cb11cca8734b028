//! Experiment harness for `ratchet-core`: TOML configuration, replicated
//! runs with CSV, PNG and manifest outputs, and SVG plotting.

pub mod config;
pub mod experiment;
pub mod images;
pub mod plot;
pub mod table;

/// Failure classes, mapped to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad configuration or inputs, detected before any run starts.
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 1,
            AppError::Runtime(_) => 2,
        }
    }
}

impl From<ratchet_core::Error> for AppError {
    fn from(e: ratchet_core::Error) -> Self {
        AppError::Runtime(e.into())
    }
}
