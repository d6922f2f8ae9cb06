use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two inputs that must agree in shape do not.
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    /// Sampled functions compared on different grids.
    #[error("sampled functions use different grids")]
    GridMismatch,

    /// Malformed or out-of-range arguments.
    #[error("invalid input: {0}")]
    Input(String),

    /// Every sampled pair was degenerate, so no ratio could be formed.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// The closed-ball precondition `ln d(f x0, x0) <= (1 - lambda) ln eps` failed.
    #[error("ball precondition rejected: ln d(f x0, x0) = {measured_log} exceeds {allowed_log}")]
    Precondition { measured_log: f64, allowed_log: f64 },

    /// A runtime invariant of a solver was violated, usually because the
    /// supplied contraction constant is wrong for the map.
    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    /// An iterate left the space the map is declared on.
    #[error("iterate {index} left the domain: {reason}")]
    LeftDomain { index: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown registry id `{0}`")]
    UnknownId(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
