use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    InvalidVertex { vertex: usize, vertex_count: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid hypothesis class: {0}")]
    InvalidClass(String),

    #[error("hypothesis has {got} labels, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty version space: the observed sequence is not realizable by the class")]
    EmptyVersionSpace,

    #[error("invalid classifier distribution: {0}")]
    InvalidDistribution(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible configuration: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
