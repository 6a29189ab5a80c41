use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("color {color} exceeds the level bound {max} of the root-of-unity backend")]
    LevelViolation { color: u32, max: u32 },

    #[error("oracle budget exceeded: {needed} basis diagrams needed, budget is {budget}")]
    OracleBudget { needed: u64, budget: u64 },

    #[error(
        "storage budget exceeded: {needed} bytes needed, budget is {budget}; use streaming mode"
    )]
    StorageBudget { needed: u64, budget: u64 },

    #[error("network has {0} open ends; a closed network is required")]
    OpenNetwork(usize),

    #[error("malformed network: {0}")]
    Malformed(String),

    #[error("arity mismatch: {open} open ends but {targets} attachment vertices")]
    Arity { open: usize, targets: usize },

    #[error("coloring does not cover the network: {0}")]
    Coloring(String),

    #[error("index set arity mismatch: expected {expected}, got {got}")]
    IndexArity { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
