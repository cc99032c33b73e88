//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A probability distribution failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A scan sequence or permutation failed validation.
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    /// A slot index past the end of a non-periodic precomputed sequence.
    #[error("slot {slot} is beyond the sequence horizon {horizon}")]
    HorizonExceeded { slot: usize, horizon: usize },

    /// A support sector is never scanned at or after some reachable entry
    /// slot, so the exact evaluators cannot assign it a discovery time.
    #[error(
        "sector {sector} is never scanned at or after entry slot {entry_slot} \
         within the sequence"
    )]
    Coverage { entry_slot: usize, sector: usize },

    /// An experiment configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Bad command line or config-file input.
    #[error("{0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
