use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("n*d = {n}*{d} is odd; no {d}-regular graph on {n} vertices exists")]
    Parity { n: usize, d: usize },

    #[error("random regular generator gave up after {attempts} attempts (n={n}, d={d})")]
    RejectionBudget { n: usize, d: usize, attempts: usize },

    #[error("operation requires a regular graph")]
    NotRegular,

    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("({asker}, {subject}) is not an edge")]
    NotAnEdge { asker: usize, subject: usize },

    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from user-supplied configuration rather than
    /// a failure while running.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidParameter(_)
                | Error::Parity { .. }
                | Error::TooLarge(_)
                | Error::Unsupported(_)
                | Error::Parse { .. }
                | Error::InvalidGraph(_)
        )
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
