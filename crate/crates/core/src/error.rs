use thiserror::Error;

use crate::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands belong to different groups")]
    GroupMismatch,

    #[error("invalid divisor {0}: every cyclic factor needs order at least 1")]
    InvalidDivisor(i64),

    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderTooLarge { order: u64, cap: u64 },

    #[error("coordinate {value} out of range for factor of order {modulus}")]
    CoordinateOutOfRange { value: i64, modulus: u64 },

    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("invalid semi-direct system: {0}")]
    InvalidSystem(String),

    #[error("unknown H label `{0}`")]
    UnknownLabel(String),

    #[error("H index {0} out of range")]
    UnknownIndex(usize),

    #[error("expected a {expected} function, found a {found} function")]
    SideMismatch { expected: Side, found: Side },

    #[error("measure does not match the function role: {0}")]
    RoleMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("catalog: {0}")]
    Catalog(String),
}
