use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `tk` was asked to divide by a κ-cosine below the pole threshold.
    #[error("κ-tangent evaluated at a pole (|ck| = {ck:e})")]
    DivisionAtPole { ck: f64 },

    #[error("generator indices must satisfy mu < nu, got ({mu}, {nu})")]
    IndexOrder { mu: usize, nu: usize },

    #[error("index {index} outside the admissible range {min}..={max}")]
    IndexRange {
        index: usize,
        min: usize,
        max: usize,
    },

    /// A denominator of an observable vanished at the evaluation point.
    #[error("singular evaluation: {0}")]
    SingularEvaluation(&'static str),

    /// The polar chart degenerates at the requested phase point.
    #[error("chart degenerate: {0}")]
    ChartDegenerate(&'static str),

    #[error("beta_{index} must vanish for this system, got {value}")]
    BetaNotZero { index: usize, value: f64 },

    #[error("trajectory approached a chart singularity ({locus}) at step {step}")]
    SingularityApproach { step: usize, locus: &'static str },

    #[error("implicit midpoint solver failed to converge at step {step}")]
    NewtonDivergence { step: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl Error {
    /// True for errors that signal a point sitting on (or too near) a
    /// singular locus rather than a programming or configuration mistake.
    pub fn is_singular(&self) -> bool {
        matches!(
            self,
            Error::DivisionAtPole { .. } | Error::SingularEvaluation(_) | Error::ChartDegenerate(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
