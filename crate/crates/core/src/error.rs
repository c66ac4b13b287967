use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports. Callers that need coarse routing
/// (the CLI exit codes, for one) should go through [`Error::class`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("hypothesis violated: {hypothesis} ({detail})")]
    Assumption { hypothesis: String, detail: String },

    #[error("condition {kind} not certified: {detail}")]
    Condition { kind: String, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("moment of order {order} diverges: {detail}")]
    DivergentMoment { order: f64, detail: String },

    #[error("quadrature did not converge: achieved relative error {achieved:.3e} after {evals} evaluations")]
    QuadratureFailure { achieved: f64, evals: usize },

    #[error("no Pickands constant available for alpha_loc = {alpha}; supply one or run the estimator")]
    MissingPickands { alpha: f64 },

    #[error("no E-constant available: {0}")]
    MissingEConstant(String),

    #[error("boundary case excluded: {0}")]
    BoundaryCase(String),

    #[error("circulant embedding failed: {0}")]
    EmbeddingFailure(String),
}

/// Coarse grouping used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: unknown family, malformed parameters, out-of-domain evaluation.
    Input,
    /// A theorem hypothesis or domination condition does not hold.
    Hypothesis,
    /// Numerics or simulation failed.
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_)
            | Error::Spec(_)
            | Error::MissingPickands { .. }
            | Error::MissingEConstant(_) => ErrorClass::Input,
            Error::Assumption { .. }
            | Error::Condition { .. }
            | Error::Unsupported(_)
            | Error::DivergentMoment { .. }
            | Error::BoundaryCase(_) => ErrorClass::Hypothesis,
            Error::QuadratureFailure { .. } | Error::EmbeddingFailure(_) => ErrorClass::Numeric,
        }
    }

    pub(crate) fn assumption(hypothesis: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Assumption { hypothesis: hypothesis.into(), detail: detail.into() }
    }

    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::Spec(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
