//! Error type shared across the crate.

/// Errors reported by divergence computations, interval construction and the
/// experiment harness.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A policy was invoked with an empty sample.
    #[error("empty sample")]
    EmptySample,

    /// Data left the support the method assumes (e.g. a value outside [0,1]).
    #[error("support violation: {0}")]
    Support(String),

    /// The empirical (1+eps)-th absolute moment exceeds the configured bound,
    /// so the heavy-tailed divergence is not defined for this sample yet.
    #[error("moment bound violated: empirical E|X|^(1+eps) = {observed} > {bound}")]
    MomentViolation { observed: f64, bound: f64 },

    /// A method has a formula-specific minimum sample size.
    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    /// A root-finding bracket did not satisfy its precondition.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// An empirical distribution failed a structural invariant.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
