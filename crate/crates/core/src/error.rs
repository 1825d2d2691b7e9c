use thiserror::Error;

/// Errors raised by the algebra, credence and integration routines.
///
/// Values are rendered to strings so the error type stays independent of the
/// scalar type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed interval ({lo}, {hi}): lower end must be strictly below upper end")]
    MalformedInterval { lo: String, hi: String },
    #[error("interval ({lo}, {hi}) escapes the ambient {ambient}")]
    OutOfAmbient { lo: String, hi: String, ambient: String },
    #[error("ambient mismatch: {0} vs {1}")]
    AmbientMismatch(String, String),
    #[error("invalid ambient: {0}")]
    InvalidAmbient(String),
    #[error("ambient {0} has an infinite end")]
    UnboundedAmbient(String),
    #[error("set {0} is not an element of the finite algebra")]
    NotInAlgebra(String),
    #[error("lebesgue credence needs an ambient of finite length, got {0}")]
    Unnormalizable(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("not a refinement: {0}")]
    NotARefinement(String),
    #[error("partitions have different targets")]
    TargetMismatch,
    #[error("unsupported credence rule: {0}")]
    UnsupportedRule(String),
    #[error("conditioning on a set of zero mass")]
    ZeroMassConditioning,
    #[error("simple function is not subordinate to the algebra: {0}")]
    NotSubordinate(String),
    #[error("algebra closure has {size} elements, above the cap {cap}")]
    ClosureTooLarge { size: u128, cap: u128 },
    #[error("refining sequence stopped at {last} with gap {gap} above tolerance {eps}")]
    NoConvergence { last: String, gap: String, eps: String },
    #[error("requested {requested} points, cap is {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("bad removal ratio at stage {stage}: {ratio}")]
    BadRatio { stage: usize, ratio: String },
    #[error("no admissible radius around r_{index} at the configured resolution")]
    Exhausted { index: usize },
    #[error("invalid credence: {0}")]
    InvalidCredence(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
