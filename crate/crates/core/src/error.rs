use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("node {0} out of range (graph has {1} nodes)")]
    NodeOutOfRange(u32, u32),
    #[error("self loop at node {0}")]
    SelfLoop(u32),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(u32, u32),
    #[error("edge ({0}, {1}) not present")]
    MissingEdge(u32, u32),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("graph too large for exhaustive enumeration ({0} nodes > cap {1}); use the spectral bound")]
    ExhaustiveCapExceeded(u32, u32),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
