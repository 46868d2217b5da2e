use thiserror::Error;

use crate::forest::VertexId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("framing error: {0}")]
    Framing(String),
    #[error("step {step}: {msg}")]
    IllegalAction { step: usize, msg: String },
    #[error("line {line}: {source}")]
    AtLine { line: usize, source: Box<Error> },
    #[error("edge {0}-{1} would create a cycle")]
    Cycle(VertexId, VertexId),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
