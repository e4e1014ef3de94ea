//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; the CLI maps each variant
//! class onto a distinct process exit code (see [`Error::exit_code`]).

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Bit strings of unequal length passed to a positional operation.
    #[error("length mismatch: {left} vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    /// A bit stream did not contain a complete self-delimiting code.
    #[error("malformed self-delimiting code: {0}")]
    MalformedCode(String),

    /// Unknown reference machine identifier.
    #[error("unknown machine id {0:?}")]
    UnknownMachine(String),

    /// A table lookup for a condition that was never enumerated.
    #[error("condition {0} not enumerated in this table")]
    ConditionNotEnumerated(String),

    /// A required table entry is absent, i.e. only the one-sided bound
    /// K > L is known for it.
    #[error("no entry for output {output} under condition {condition}: only K > L is known")]
    MissingEntry { condition: String, output: String },

    /// Enumeration exceeded the configured node budget.
    #[error("enumeration exceeded the node cap of {cap} nodes")]
    ResourceLimit { cap: u64 },

    /// A persisted file failed structural validation.
    #[error("malformed file {path}: {detail}")]
    MalformedFile { path: PathBuf, detail: String },

    /// Two matrices that must share a domain do not.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// Not enough data points for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Regression cannot be identified from the supplied points.
    #[error("singular fit: {0}")]
    SingularFit(String),

    /// An input value outside the operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// External compressor plugin failure.
    #[error("compressor plugin {path}: {detail}")]
    Plugin { path: PathBuf, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI. Documented in `infodist --help`.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownMachine(_) => 2,
            Error::Io(_) => 3,
            Error::MalformedFile { .. } | Error::MalformedCode(_) => 4,
            Error::InsufficientData(_) | Error::SingularFit(_) => 5,
            Error::ResourceLimit { .. } => 6,
            Error::LengthMismatch { .. }
            | Error::ConditionNotEnumerated(_)
            | Error::MissingEntry { .. }
            | Error::DomainMismatch(_)
            | Error::InvalidInput(_) => 7,
            Error::Plugin { .. } => 8,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
