use fleetassign_core::SolveError;
use fleetassign_model::ModelError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("topology is disconnected")]
    Disconnected,
    #[error("topology has {nodes} nodes but the instance has {agents} agents")]
    NodeCount { nodes: usize, agents: usize },
    #[error("protocol expects {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no convergence after {rounds} rounds ({conflicts} contested tasks, {unassigned} unassigned agents)")]
    NonConvergence {
        rounds: usize,
        conflicts: usize,
        unassigned: usize,
    },
    #[error("topology file: {0}")]
    Format(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
