use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("zero input where a nonzero scalar is required")]
    ZeroInput,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("rationals have infinitely many square classes; {0}")]
    InfiniteSquareClassGroup(String),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("cycle detected through `{0}` and `{1}`")]
    CycleDetected(String, String),
    #[error("size bound exceeded: {what} is {actual}, bound is {bound}")]
    BoundExceeded { what: String, actual: u128, bound: u128 },
    #[error("not an involution: {0}")]
    NotAnInvolution(String),
    #[error("not a poset map: {0}")]
    NotAPosetMap(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("poset or field mismatch between operands")]
    Mismatch,
    #[error("not invertible: diagonal entry at `{0}` is zero")]
    NotInvertible(String),
    #[error("empty component set")]
    EmptyComponentSet,
    #[error("component set is not stable under the involution")]
    NotStable,
    #[error("not multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("map kind mismatch: {0}")]
    KindMismatch(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("the involutions induce different poset involutions")]
    LambdaMismatch,
    #[error("hypothesis gate failed: component {component} has a non-fractional multiplicative element")]
    HypothesisGateFailed { component: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn bound_check(what: &str, actual: u128, bound: u128) -> Result<()> {
    if actual > bound {
        Err(Error::BoundExceeded { what: what.to_string(), actual, bound })
    } else {
        Ok(())
    }
}
