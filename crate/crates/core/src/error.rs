use alloc::string::String;

use crate::semigroup::ValidationReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Raw input that does not even describe a semigroup (non-square table,
    /// out-of-range entries, empty window, ...).
    #[error("structural error: {0}")]
    Structural(String),
    #[error("not a commutative semigroup: {0}")]
    InvalidSemigroup(ValidationReport),
    #[error("element code {code} is not in a universe of size {size}")]
    ForeignElement { code: u32, size: u32 },
    #[error("operands belong to different semigroups")]
    SemigroupMismatch,
    #[error("usage error: {0}")]
    Usage(String),
    #[error("window overflow: {0}")]
    WindowOverflow(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("enumeration of {required} cases exceeds the cost guard of {limit}")]
    CostGuard { required: u128, limit: u128 },
    #[error("witness rejected: {0}")]
    InvalidWitness(String),
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
