use std::io;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = KorError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum KorError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph constraint violated: {0}")]
    Constraint(String),

    #[error("no edge from node {from} to node {to}")]
    InvalidRoute { from: NodeId, to: NodeId },

    #[error("node {to} is unreachable from node {from}")]
    NoPath { from: NodeId, to: NodeId },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("instance too large for exhaustive search: {0}")]
    OracleLimit(String),

    #[error("preprocessed tables do not match the graph: {0}")]
    TableMismatch(String),

    #[error("benchmark aborted: {0}")]
    Benchmark(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl KorError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        KorError::Parse {
            line,
            message: message.into(),
        }
    }
}
