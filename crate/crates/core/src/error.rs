use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid temporal edge list: {0}")]
    InvalidEdges(String),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("exact search aborted after {nodes} nodes (budget exhausted)")]
    SearchAborted { nodes: u64 },

    #[error("infeasible parameters: {reason}{}", nearest_n.map(|n| format!(" (nearest feasible n: {n})")).unwrap_or_default())]
    Infeasible { reason: String, nearest_n: Option<u64> },

    #[error("threshold not bracketed for n = {n}: {reason}; extend the grid")]
    NoBracket { n: u64, reason: String },

    #[error("{}:{line}: {reason}", path.display())]
    Parse { path: PathBuf, line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
