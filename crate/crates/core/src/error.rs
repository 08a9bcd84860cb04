use thiserror::Error;

/// Errors raised by the dissection kernels and the numeric routines built on them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed dissection `{text}`: {reason}")]
    Malformed { text: String, reason: String },
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("chord `{token}` is out of range for a {n}-gon")]
    ChordOutOfRange { token: String, n: usize },
    #[error("chord `{token}` is a polygon edge, not a diagonal")]
    PolygonEdge { token: String },
    #[error("chord `{token}` crosses chord `{other}`")]
    Crossing { token: String, other: String },
    #[error("chord `{token}` appears twice")]
    DuplicateChord { token: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("illegal surgery: {0}")]
    IllegalSurgery(String),
    #[error("fixed-point iteration did not settle: {0}")]
    NonConvergence(String),
    #[error("dissection is not 3-periodic: {0}")]
    NotThreePeriodic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
