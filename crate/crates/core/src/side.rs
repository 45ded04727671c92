//! Assignment with knapsack-type side constraints, solved by depth-first
//! branch and bound.
//!
//! Agents are fixed in ascending order. Candidate tasks for an agent are
//! tried by ascending reduced cost under the root LAP duals. A node is pruned
//! when its LAP relaxation (fixed cost plus the optimal completion of the
//! residual instance, budgets ignored) is no better than the incumbent, or
//! when the fixed usage plus the cheapest possible usage of the remaining
//! agents exceeds some budget.

use fleetassign_model::{AssignmentInstance, Matching, Rational, SideConstraintSet};
use num_traits::Zero;

use crate::error::{SolveError, SolveResult};
use crate::hungarian::solve_int;
use crate::scaled::IntCosts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideConstrainedSolution {
    pub matching: Matching,
    pub value: Rational,
    /// Branch nodes expanded.
    pub nodes: u64,
}

/// LAP optimum over the agents and tasks not covered by `fixed`.
fn residual_lap(costs: &IntCosts, fixed: &[(usize, usize)]) -> Option<i64> {
    let n = costs.rows;
    let mut agent_used = vec![false; n];
    let mut task_used = vec![false; n];
    for &(i, j) in fixed {
        agent_used[i] = true;
        task_used[j] = true;
    }
    let agents: Vec<usize> = (0..n).filter(|&i| !agent_used[i]).collect();
    let tasks: Vec<usize> = (0..n).filter(|&j| !task_used[j]).collect();
    let k = agents.len();
    let mut values = Vec::with_capacity(k * k);
    let mut allowed = Vec::with_capacity(k * k);
    for &i in &agents {
        for &j in &tasks {
            values.push(costs.get(i, j));
            allowed.push(costs.is_allowed(i, j));
        }
    }
    let sub = IntCosts::from_parts(k, k, values, allowed, costs.scale).ok()?;
    solve_int(&sub).map(|lap| lap.total)
}

/// Lower bound used at the node where the pairs in `fixed` are committed:
/// their cost plus the unconstrained LAP optimum of the residual instance.
/// `None` when the residual instance has no perfect matching.
pub fn side_constraint_bound(instance: &AssignmentInstance, fixed: &[(usize, usize)]) -> SolveResult<Option<Rational>> {
    let costs = IntCosts::square_cost(instance)?;
    Matching::new(costs.rows, costs.cols, fixed.to_vec())?;
    if fixed.iter().any(|&(i, j)| !costs.is_allowed(i, j)) {
        return Ok(None);
    }
    let fixed_cost: i64 = fixed.iter().map(|&(i, j)| costs.get(i, j)).sum();
    Ok(residual_lap(&costs, fixed).map(|rest| costs.to_rational(fixed_cost + rest)))
}

struct Search<'a> {
    costs: &'a IntCosts,
    constraints: &'a SideConstraintSet,
    order: Vec<Vec<usize>>,
    /// `remaining_min[i][k]`: least usage of resource `k` by agents `i..`.
    remaining_min: Vec<Vec<Rational>>,
    path: Vec<(usize, usize)>,
    task_used: Vec<bool>,
    incumbent: Option<(i64, Vec<(usize, usize)>)>,
    nodes: u64,
}

impl Search<'_> {
    fn descend(&mut self, agent: usize, cost: i64, usage: &[Rational]) {
        self.nodes += 1;
        let n = self.costs.rows;
        if agent == n {
            if self.incumbent.as_ref().is_none_or(|(best, _)| cost < *best) {
                self.incumbent = Some((cost, self.path.clone()));
            }
            return;
        }
        for index in 0..self.order[agent].len() {
            let task = self.order[agent][index];
            if self.task_used[task] || !self.costs.is_allowed(agent, task) {
                continue;
            }
            let next_usage: Vec<Rational> = self
                .constraints
                .resources
                .iter()
                .zip(usage)
                .map(|(r, u)| u + r.usage(agent, task))
                .collect();
            let over_budget = self
                .constraints
                .resources
                .iter()
                .enumerate()
                .any(|(k, r)| next_usage[k] + self.remaining_min[agent + 1][k] > r.budget());
            if over_budget {
                continue;
            }
            let next_cost = cost + self.costs.get(agent, task);
            self.path.push((agent, task));
            let bound = residual_lap(self.costs, &self.path).map(|rest| next_cost + rest);
            let promising = bound.is_some_and(|b| self.incumbent.as_ref().is_none_or(|(best, _)| b < *best));
            if promising {
                self.task_used[task] = true;
                self.descend(agent + 1, next_cost, &next_usage);
                self.task_used[task] = false;
            }
            self.path.pop();
        }
    }
}

pub fn solve_with_side_constraints(
    instance: &AssignmentInstance,
    constraints: &SideConstraintSet,
) -> SolveResult<SideConstrainedSolution> {
    let costs = IntCosts::square_cost(instance)?;
    constraints.check_dimensions(instance)?;
    let n = costs.rows;
    let infeasible = || SolveError::Infeasible("no perfect matching within the resource budgets".into());
    let root = solve_int(&costs).ok_or_else(infeasible)?;

    let root_matching = Matching::from_permutation(&root.task_of_agent)?;
    if constraints.is_satisfied_by(&root_matching) {
        return Ok(SideConstrainedSolution {
            value: costs.to_rational(root.total),
            matching: root_matching,
            nodes: 1,
        });
    }

    let order = (0..n)
        .map(|i| {
            let mut tasks: Vec<usize> = (0..n).filter(|&j| costs.is_allowed(i, j)).collect();
            tasks.sort_by_key(|&j| (costs.get(i, j) - root.u[i] - root.v[j], j));
            tasks
        })
        .collect();
    let mut remaining_min = vec![vec![Rational::zero(); constraints.resources.len()]; n + 1];
    for i in (0..n).rev() {
        for (k, r) in constraints.resources.iter().enumerate() {
            let least = (0..n)
                .filter(|&j| costs.is_allowed(i, j))
                .map(|j| r.usage(i, j))
                .min()
                .unwrap_or_else(Rational::zero);
            remaining_min[i][k] = remaining_min[i + 1][k] + least;
        }
    }
    let mut search = Search {
        costs: &costs,
        constraints,
        order,
        remaining_min,
        path: Vec::with_capacity(n),
        task_used: vec![false; n],
        incumbent: None,
        nodes: 0,
    };
    search.descend(0, 0, &vec![Rational::zero(); constraints.resources.len()]);
    let (best, pairs) = search.incumbent.ok_or_else(infeasible)?;
    Ok(SideConstrainedSolution {
        matching: Matching::new(n, n, pairs)?,
        value: costs.to_rational(best),
        nodes: search.nodes,
    })
}
