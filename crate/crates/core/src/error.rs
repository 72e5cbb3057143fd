use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("graph is not acyclic")]
    NotAcyclic,

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("{algorithm} answered {answer} for query ({s}, {t}), expected {expected}")]
    Mismatch {
        algorithm: String,
        s: Vertex,
        t: Vertex,
        answer: bool,
        expected: bool,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
