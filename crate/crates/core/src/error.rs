use thiserror::Error;

/// Errors raised by the families, measures, oracle and estimation modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A user-facing (source) parameter violates its constraint.
    #[error("parameter `{field}` out of domain: {reason}")]
    ParameterOutOfDomain { field: &'static str, reason: String },

    /// A natural parameter lies outside the open natural domain.
    #[error("natural parameter out of domain for {family}")]
    NaturalOutOfDomain { family: String },

    /// `αθ` left the natural domain.
    #[error("scaled parameter αθ out of domain for {family} at α = {alpha}")]
    ScaledOutOfDomain { family: String, alpha: f64 },

    /// `αθ + (1-α)θ'` left the natural domain.
    #[error("mixed parameter αθ + (1-α)θ' out of domain for {family} at α = {alpha}")]
    MixedOutOfDomain { family: String, alpha: f64 },

    /// An expectation parameter is on or beyond the boundary of the mean domain.
    #[error("expectation parameter out of domain for {family}")]
    ExpectationOutOfDomain { family: String },

    #[error("observation out of support for {family}: {detail}")]
    ObservationOutOfSupport { family: String, detail: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid order α = {0}")]
    InvalidAlpha(f64),

    #[error("logarithm of non-positive value {0}")]
    LogOfNonpositive(f64),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("family mismatch: {0} vs {1}")]
    FamilyMismatch(String, String),

    #[error("{0}")]
    MissingSample(String),

    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),

    /// Finite-difference step would leave the natural domain.
    #[error("finite-difference step {step} leaves the natural domain")]
    StepOutOfDomain { step: f64 },

    /// Quadrature, series or tail search did not converge.
    #[error("oracle did not converge: {0}")]
    NonConvergence(String),
}

impl Error {
    /// True for every error caused by out-of-domain or degenerate inputs.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::NonConvergence(_) | Error::InvalidConfig(_) | Error::MissingSample(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
