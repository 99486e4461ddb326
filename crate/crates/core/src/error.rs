use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("twist parameter must be positive and finite, got {0}")]
    NonPositiveParameter(f64),

    #[error("exponent bound is undefined for the zero matrix (V is constantly |det| t^0 or 0)")]
    ZeroMatrix,

    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,

    #[error("expected a one-variable polynomial, found {0} variables")]
    NotUnivariate(usize),

    #[error("cohomology class has no (r, phi) decomposition")]
    MissingDecomposition,

    #[error("invalid cohomology class: {0}")]
    InvalidClass(String),

    #[error("quadrature budget exhausted: best estimate {estimate}, achieved tolerance {achieved:e}")]
    QuadratureBudget { estimate: f64, achieved: f64 },

    #[error("slice polynomial vanished identically at a quadrature node")]
    DegenerateSlice,

    #[error("tie between weights {first} and {second}: r-independence assertion violated")]
    WeightTie { first: f64, second: f64 },

    #[error("function is constantly zero")]
    ZeroFunction,

    #[error("value unspecified at t = {0}")]
    Unspecified(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Numeric budget failures are distinguished from degeneracies by callers
    /// that map errors onto exit codes.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::QuadratureBudget { .. })
    }

    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::WeightTie { .. }
                | Error::DegenerateSlice
                | Error::ZeroFunction
                | Error::ZeroMatrix
                | Error::ZeroPolynomial
                | Error::Unspecified(_)
        )
    }
}
