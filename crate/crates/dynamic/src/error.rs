use fleetassign_core::SolveError;
use fleetassign_model::ModelError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
