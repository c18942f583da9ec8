use thiserror::Error;

use crate::graph::Vertex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("graph must have at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("graph is disconnected (vertex {0} unreachable from vertex 1)")]
    Disconnected(Vertex),
    #[error("boundary vertex {0} listed more than once")]
    DuplicateBoundary(Vertex),
    #[error("instance needs at least one tail")]
    NoBoundary,
    #[error("{inflow} inflow values for {boundary} boundary vertices")]
    InflowMismatch { boundary: usize, inflow: usize },
    #[error("phase must be +1 or -1, got {0}")]
    BadPhase(String),
    #[error("invalid rational {0:?}")]
    BadRational(String),

    #[error("{what} = {value} outside supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: &'static str,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular {dim}x{dim} system (rank {rank})")]
    Singular { dim: usize, rank: usize },
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("residual check failed after {0}")]
    Residual(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{quantity}: enumeration gives {enumerated}, determinant gives {determinant}")]
    OracleMismatch {
        quantity: &'static str,
        enumerated: String,
        determinant: String,
    },
    #[error("{law} violated at {location}")]
    Audit { law: &'static str, location: String },
}

impl Error {
    /// True for malformed or unsupported input, as opposed to a failed
    /// computation or audit.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::TooFewVertices(_)
                | Error::VertexOutOfRange { .. }
                | Error::SelfLoop(_)
                | Error::DuplicateEdge(..)
                | Error::Disconnected(_)
                | Error::DuplicateBoundary(_)
                | Error::NoBoundary
                | Error::InflowMismatch { .. }
                | Error::BadPhase(_)
                | Error::BadRational(_)
                | Error::OutOfRange { .. }
                | Error::Precondition(_)
        )
    }
}
