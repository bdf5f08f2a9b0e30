use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::padic::PadicError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("the x coefficient a of the numerator must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("the map does not have a unique fixed point")]
    NotUniqueFixedPoint,
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("ball of radius p^-({rho}) around a point of norm p^-({r}) is not inside that sphere")]
    BallNotInSphere { r: String, rho: String },
    #[error("sqrt(-a) does not exist in Q_p")]
    SqrtOfMinusANotInQp,
    #[error("points do not form a cycle: {0}")]
    NotACycle(String),
}

impl From<PadicError> for AnalysisError {
    fn from(e: PadicError) -> Self {
        AnalysisError::Dynamics(DynamicsError::Padic(e))
    }
}

impl AnalysisError {
    /// Whether the failure is a loss of working precision rather than bad input.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            AnalysisError::Dynamics(DynamicsError::Padic(PadicError::PrecisionExhausted(_)))
                | AnalysisError::Dynamics(DynamicsError::Padic(PadicError::DivisionByZeroToPrecision))
        )
    }
}
