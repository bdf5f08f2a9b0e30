use thiserror::Error;

use crate::padic::{NormValue, PadicError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("the map parameter a must be nonzero")]
    ZeroParameter,
    #[error("x² + a vanishes at working precision (pole of the map)")]
    PoleHit,
    #[error("r = sqrt(A) needs A*, but neither a point nor a value was supplied")]
    AstarUnresolvable,
    #[error("supplied A* = p^-({astar}) is below sqrt(A) = p^-({sqrt_a})")]
    AstarBelowSqrtA { astar: NormValue, sqrt_a: NormValue },
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),
}
