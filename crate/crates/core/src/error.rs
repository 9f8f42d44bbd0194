use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("dimension mismatch: expected {expected} residues, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid channel: {}", .0.join("; "))]
    InvalidChannel(Vec<String>),
    #[error("invalid user subset: {0}")]
    InvalidSubset(String),
    #[error("({y}, z={z}) is not in the support of (Y, Z)")]
    NotInSupport { y: String, z: usize },
    #[error("synthesis depth {depth} exceeds the configured maximum {max}")]
    DepthExceeded { depth: usize, max: usize },
    #[error("invalid sign sequence {0:?}: expected characters '-' or '+'")]
    InvalidSignSequence(String),
    #[error("{0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
