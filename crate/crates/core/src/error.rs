use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed scalar literal {0:?}")]
    Scalar(String),
    #[error("malformed state: {0}")]
    State(String),
    #[error("all-zero state")]
    ZeroState,
    #[error("duplicate index {0}")]
    DuplicateIndex(String),
    #[error("invalid permutation {0:?}")]
    Permutation(String),
    #[error("multidegree mismatch: {0}")]
    Multidegree(String),
    #[error("transvectant order {orders:?} exceeds degrees {left:?} / {right:?}")]
    TransvectantOrder { orders: [u8; 4], left: [u8; 4], right: [u8; 4] },
    #[error("recipe catalog: {0}")]
    Catalog(String),
    #[error("expected {expected} parameters for {family}, got {got}")]
    Arity { family: String, expected: usize, got: usize },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("inconsistent specialization: {0}")]
    Specialization(String),
    #[error("no table row matched: {0}")]
    NoMatch(String),
    #[error("{0}")]
    Unsupported(String),
}
