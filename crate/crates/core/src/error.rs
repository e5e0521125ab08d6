use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arithmetic across different quadratic fields")]
    CrossFieldArithmetic,
    #[error("comparison across different quadratic fields")]
    CrossFieldComparison,
    #[error("division by zero")]
    DivisionByZero,
    #[error("image leaves the supported number fields")]
    UnsupportedField,
    #[error("the identity element is not a valid input here")]
    IdentityElement,
    #[error("elliptic element has order above the cap {0}")]
    EllipticOrderOverflow(u64),
    #[error("iteration cap {0} exceeded")]
    IterationCapExceeded(u64),
    #[error("region is not forward invariant under the element")]
    NotForwardInvariant,
    #[error("cannot sample a point from a region without interior")]
    EmptyRegionSample,
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("element is not in the subgroup generated by the table: {0}")]
    NotInSubgroup(String),
    #[error("exponent cap {0} exceeded while recovering a syllable")]
    ExponentCapExceeded(u64),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("the set to be placed must be a proper subset of the boundary")]
    ImproperSigma,
    #[error("operation not supported for this group family: {0}")]
    UnsupportedFamily(String),
    #[error("group is elementary: {0}")]
    ElementaryGroup(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
