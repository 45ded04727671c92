use fleetassign_model::{ModelError, Rational};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("instance must be square (got {agents}x{tasks})")]
    NotSquare { agents: usize, tasks: usize },
    #[error("solver expects a {expected} instance")]
    WrongSense { expected: &'static str },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("epsilon must be positive (got {0})")]
    InvalidEpsilon(Rational),
    #[error("k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("weights too large for exact integer scaling: {0}")]
    Overflow(String),
    #[error("no convergence after {rounds} rounds")]
    NonConvergence { rounds: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type SolveResult<T> = Result<T, SolveError>;
