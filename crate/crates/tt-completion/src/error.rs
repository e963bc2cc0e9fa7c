use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid mode index {mode} for an order-{order} tensor")]
    InvalidMode { mode: usize, order: usize },

    #[error("invalid split position {split} for an order-{order} tensor")]
    InvalidSplit { split: usize, order: usize },

    #[error("invalid TT-rank: {0}")]
    InvalidRank(String),

    #[error("tensor train chain violation: {0}")]
    Chain(#[from] ChainViolation),

    #[error("index {index:?} out of range for shape {shape:?}")]
    IndexOutOfRange { index: Vec<usize>, shape: Vec<usize> },

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("least-squares solve failed: {0}")]
    Solve(String),

    #[error("slice has no observed entries")]
    EmptySlice,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("recovery error is undefined: the missing part of the reference tensor is identically zero")]
    DegenerateReme,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("io error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Structural problems a tensor train chain can have.
///
/// Returned by [`crate::tt::TTTensor::validate`]; the variants name exactly
/// what is broken so diagnostics can point at the offending core.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainViolation {
    #[error("chain has no cores")]
    Empty,

    #[error("boundary rank: r_0 = {left} and r_n = {right}, both must be 1")]
    BoundaryRank { left: usize, right: usize },

    #[error(
        "rank adjacency broken at junction {junction}: core {junction} has right rank \
         {r_next} but core {} has left rank {r_prev_next}", junction + 1
    )]
    Adjacency {
        junction: usize,
        r_next: usize,
        r_prev_next: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
