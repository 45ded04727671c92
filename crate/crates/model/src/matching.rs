use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// A conflict-free set of agent-task pairs, kept sorted by agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    n_agents: usize,
    n_tasks: usize,
    pairs: Vec<(usize, usize)>,
    is_perfect: bool,
}

impl Matching {
    pub fn new(n_agents: usize, n_tasks: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self, ModelError> {
        let mut agent_seen = vec![false; n_agents];
        let mut task_seen = vec![false; n_tasks];
        for &(agent, task) in &pairs {
            if agent >= n_agents || task >= n_tasks {
                return Err(ModelError::PairOutOfRange {
                    agent,
                    task,
                    agents: n_agents,
                    tasks: n_tasks,
                });
            }
            if std::mem::replace(&mut agent_seen[agent], true) {
                return Err(ModelError::DuplicateAgent(agent));
            }
            if std::mem::replace(&mut task_seen[task], true) {
                return Err(ModelError::DuplicateTask(task));
            }
        }
        pairs.sort_unstable();
        let is_perfect = n_agents == n_tasks && pairs.len() == n_agents;
        Ok(Self {
            n_agents,
            n_tasks,
            pairs,
            is_perfect,
        })
    }

    pub fn empty(n_agents: usize, n_tasks: usize) -> Self {
        Self {
            n_agents,
            n_tasks,
            pairs: Vec::new(),
            is_perfect: false,
        }
    }

    /// Builds a matching from `task_of_agent[i]`.
    pub fn from_assignment(n_tasks: usize, task_of_agent: &[Option<usize>]) -> Result<Self, ModelError> {
        let pairs = task_of_agent
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|j| (i, j)))
            .collect();
        Self::new(task_of_agent.len(), n_tasks, pairs)
    }

    /// Builds a perfect matching from a permutation `task_of_agent`.
    pub fn from_permutation(task_of_agent: &[usize]) -> Result<Self, ModelError> {
        let n = task_of_agent.len();
        Self::new(n, n, task_of_agent.iter().copied().enumerate().collect())
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_perfect(&self) -> bool {
        self.is_perfect
    }

    pub fn task_of(&self, agent: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&agent, |&(i, _)| i)
            .ok()
            .map(|k| self.pairs[k].1)
    }

    pub fn agent_of(&self, task: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(_, j)| j == task).map(|&(i, _)| i)
    }

    pub fn task_of_agent(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n_agents];
        for &(i, j) in &self.pairs {
            out[i] = Some(j);
        }
        out
    }
}
