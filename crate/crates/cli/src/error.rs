use thiserror::Error;

use padic_dyn::analysis::AnalysisError;
use padic_dyn::dynamics::DynamicsError;
use padic_dyn::PadicError;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Pass = 0,
    Counterexample = 1,
    InvalidInput = 2,
    PrecisionExhausted = 3,
}

impl ExitStatus {
    pub fn label(self) -> &'static str {
        match self {
            ExitStatus::Pass => "pass",
            ExitStatus::Counterexample => "counterexample",
            ExitStatus::InvalidInput => "invalid_input",
            ExitStatus::PrecisionExhausted => "precision_exhausted",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot encode output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot encode output: {0}")]
    Csv(#[from] csv::Error),
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        CliError::Analysis(e.into())
    }
}

impl From<PadicError> for CliError {
    fn from(e: PadicError) -> Self {
        CliError::Analysis(e.into())
    }
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Analysis(e) if e.is_precision() => ExitStatus::PrecisionExhausted,
            CliError::Analysis(AnalysisError::Dynamics(DynamicsError::PoleHit))
            | CliError::Analysis(AnalysisError::Dynamics(DynamicsError::CrossCheckFailed(_))) => {
                ExitStatus::PrecisionExhausted
            }
            _ => ExitStatus::InvalidInput,
        }
    }
}
