use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("field order {q} exceeds the supported bound {max}")]
    FieldTooLarge { q: u64, max: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("arity mismatch: expected {expected}, found {found}")]
    MixedArity { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("invalid descriptor: {0}")]
    BadDescriptor(String),
    #[error("cannot expand a set of arity {from} down to arity {to}")]
    ArityShrink { from: usize, to: usize },
    #[error("vector {0} lies on the line spanned by e_alpha")]
    NotInSAlpha(String),
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("{what}: {needed} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("member {member} is not fixed by group element {element}")]
    NonInvariantMember { member: String, element: String },
    #[error("set {0} is not separating")]
    NotSeparating(String),
    #[error("no separating degree bound found up to degree {0}")]
    NotFoundWithinBudget(u32),
    #[error("no separating subset of size at most {0}")]
    NotFound(usize),
    #[error("pool of {size} members exceeds the exact-search limit {max}")]
    PoolTooLarge { size: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
