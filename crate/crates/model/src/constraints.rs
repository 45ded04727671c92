use num_traits::Zero;

use crate::error::ModelError;
use crate::instance::AssignmentInstance;
use crate::matching::Matching;
use crate::rational::Rational;

/// One knapsack-type resource: `sum r_ij x_ij <= budget`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource {
    n_agents: usize,
    n_tasks: usize,
    usage: Vec<Rational>,
    budget: Rational,
}

impl Resource {
    pub fn new(usage: Vec<Vec<Rational>>, budget: Rational) -> Result<Self, ModelError> {
        if budget < Rational::zero() {
            return Err(ModelError::InvalidValue(format!("negative budget {budget}")));
        }
        let n_agents = usage.len();
        let n_tasks = usage.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(n_agents * n_tasks);
        for (row, values) in usage.into_iter().enumerate() {
            if values.len() != n_tasks {
                return Err(ModelError::RaggedRow {
                    row,
                    found: values.len(),
                    expected: n_tasks,
                });
            }
            flat.extend(values);
        }
        Ok(Self {
            n_agents,
            n_tasks,
            usage: flat,
            budget,
        })
    }

    pub fn usage(&self, agent: usize, task: usize) -> Rational {
        self.usage[agent * self.n_tasks + task]
    }

    pub fn budget(&self) -> Rational {
        self.budget
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SideConstraintSet {
    pub resources: Vec<Resource>,
}

impl SideConstraintSet {
    pub fn new(resources: Vec<Resource>) -> Self {
        Self { resources }
    }

    pub fn check_dimensions(&self, instance: &AssignmentInstance) -> Result<(), ModelError> {
        for (k, r) in self.resources.iter().enumerate() {
            if r.n_agents != instance.n_agents() || r.n_tasks != instance.n_tasks() {
                return Err(ModelError::DimensionMismatch(format!(
                    "resource {k} is {}x{}, instance is {}x{}",
                    r.n_agents,
                    r.n_tasks,
                    instance.n_agents(),
                    instance.n_tasks()
                )));
            }
        }
        Ok(())
    }

    /// Consumption of every resource by the matching.
    pub fn usage_of(&self, pairs: &[(usize, usize)]) -> Vec<Rational> {
        self.resources
            .iter()
            .map(|r| pairs.iter().fold(Rational::zero(), |acc, &(i, j)| acc + r.usage(i, j)))
            .collect()
    }

    pub fn is_satisfied_by(&self, matching: &Matching) -> bool {
        self.usage_of(matching.pairs())
            .iter()
            .zip(&self.resources)
            .all(|(used, r)| *used <= r.budget)
    }

    /// Sub-set restricted to the given rows and columns.
    pub fn submatrix(&self, agents: &[usize], tasks: &[usize]) -> Self {
        Self {
            resources: self
                .resources
                .iter()
                .map(|r| Resource {
                    n_agents: agents.len(),
                    n_tasks: tasks.len(),
                    usage: agents
                        .iter()
                        .flat_map(|&i| tasks.iter().map(move |&j| r.usage(i, j)))
                        .collect(),
                    budget: r.budget,
                })
                .collect(),
        }
    }
}

/// Number of agents each task category must receive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiAssignmentDemand {
    demand: Vec<usize>,
}

impl SemiAssignmentDemand {
    pub fn new(demand: Vec<usize>) -> Result<Self, ModelError> {
        if demand.is_empty() {
            return Err(ModelError::InvalidValue("empty demand vector".into()));
        }
        if let Some(j) = demand.iter().position(|&d| d == 0) {
            return Err(ModelError::InvalidValue(format!(
                "demand of category {j} must be positive"
            )));
        }
        Ok(Self { demand })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.demand
    }

    pub fn total(&self) -> usize {
        self.demand.iter().sum()
    }

    pub fn categories(&self) -> usize {
        self.demand.len()
    }

    /// Checks `sum d_j = n` and `m <= n` against an `n x m` instance.
    pub fn check_against(&self, instance: &AssignmentInstance) -> Result<(), ModelError> {
        if self.categories() != instance.n_tasks() {
            return Err(ModelError::DimensionMismatch(format!(
                "{} demands for {} categories",
                self.categories(),
                instance.n_tasks()
            )));
        }
        if self.total() != instance.n_agents() {
            return Err(ModelError::DimensionMismatch(format!(
                "total demand {} differs from {} agents",
                self.total(),
                instance.n_agents()
            )));
        }
        Ok(())
    }
}
