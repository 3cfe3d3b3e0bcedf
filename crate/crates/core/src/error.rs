use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges after removing self-loops")]
    EmptyGraph,

    #[error("vertex id {0} exceeds the supported maximum of 2^48")]
    VertexIdTooLarge(u64),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("malformed {kind} file: {message}")]
    Format { kind: &'static str, message: String },

    #[error("vertex count mismatch: sidecar has {found} vertices, graph has {expected}")]
    VertexCountMismatch { expected: usize, found: usize },

    #[error(
        "exact enumeration refused: graph has {vertices} vertices (guard {limit}); \
         roughly {estimated_work:.3e} partial matches expected"
    )]
    GuardExceeded {
        vertices: usize,
        limit: usize,
        estimated_work: f64,
    },

    #[error("probability {0} is outside (0, 1)")]
    Domain(f64),

    #[error("pattern has no embedding in the graph; the ideal distribution is undefined")]
    UndefinedDistribution,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
