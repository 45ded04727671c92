//! Hungarian primal-dual method.
//!
//! Starts from the dual solution `v_j = min_i c_ij`, `u_i = min_j (c_ij - v_j)`,
//! matches greedily on tight edges, then grows alternating trees from each
//! unmatched task. Each tree search is label-setting: the dual is raised by
//! the smallest reduced cost between labelled and unlabelled vertices until a
//! tight edge reaches an unmatched agent, and the path found is augmented.

use fleetassign_model::{objective_value, AssignmentInstance, DualState, Matching, ObjectiveKind, Rational};
use num_traits::Zero;

use crate::error::{SolveError, SolveResult};
use crate::scaled::IntCosts;

/// Optimal perfect matching of an integer cost matrix with its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntLap {
    pub task_of_agent: Vec<usize>,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    pub total: i64,
}

/// Solves a square integer LAP; forbidden entries are priced above any
/// feasible perfect matching. Returns `None` when no perfect matching over
/// allowed pairs exists.
pub(crate) fn solve_int(costs: &IntCosts) -> Option<IntLap> {
    let n = costs.rows;
    debug_assert_eq!(n, costs.cols);
    if n == 0 {
        return Some(IntLap {
            task_of_agent: Vec::new(),
            u: Vec::new(),
            v: Vec::new(),
            total: 0,
        });
    }
    let big = 2 * n as i64 * costs.max_abs() + 1;
    let cost = |i: usize, j: usize| {
        if costs.is_allowed(i, j) {
            costs.get(i, j)
        } else {
            big
        }
    };

    // v: task potentials, u: agent potentials; reduced cost c_ij - u_i - v_j >= 0
    let mut v: Vec<i64> = (0..n).map(|j| (0..n).map(|i| cost(i, j)).min().unwrap()).collect();
    let mut u: Vec<i64> = (0..n)
        .map(|i| (0..n).map(|j| cost(i, j) - v[j]).min().unwrap())
        .collect();

    // agent_of_task[j], task_of_agent[i]
    let mut agent_of_task: Vec<Option<usize>> = vec![None; n];
    let mut task_of_agent: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        if let Some(i) = (0..n).find(|&i| task_of_agent[i].is_none() && cost(i, j) - u[i] - v[j] == 0) {
            agent_of_task[j] = Some(i);
            task_of_agent[i] = Some(j);
        }
    }

    // Tree search from an unmatched task. Slots index agents 1..=n, slot 0
    // is the root; `owner[slot]` is the task currently matched to that agent.
    let mut owner = vec![usize::MAX; n + 1];
    for (i, t) in task_of_agent.iter().enumerate() {
        if let Some(j) = t {
            owner[i + 1] = *j;
        }
    }
    let mut min_slack = vec![i64::MAX; n + 1];
    let mut via = vec![0usize; n + 1];
    let mut labelled = vec![false; n + 1];

    for root in 0..n {
        if agent_of_task[root].is_some() {
            continue;
        }
        owner[0] = root;
        let mut slot = 0usize;
        min_slack.iter_mut().for_each(|s| *s = i64::MAX);
        labelled.iter_mut().for_each(|l| *l = false);
        loop {
            labelled[slot] = true;
            let task = owner[slot];
            let mut delta = i64::MAX;
            let mut next = 0usize;
            for a in 1..=n {
                if labelled[a] {
                    continue;
                }
                let reduced = cost(a - 1, task) - v[task] - u[a - 1];
                if reduced < min_slack[a] {
                    min_slack[a] = reduced;
                    via[a] = slot;
                }
                if min_slack[a] < delta {
                    delta = min_slack[a];
                    next = a;
                }
            }
            for a in 0..=n {
                if labelled[a] {
                    v[owner[a]] += delta;
                    if a > 0 {
                        u[a - 1] -= delta;
                    }
                } else {
                    min_slack[a] -= delta;
                }
            }
            slot = next;
            if owner[slot] == usize::MAX {
                break;
            }
        }
        // augment along the alternating path back to the root
        loop {
            let prev = via[slot];
            owner[slot] = owner[prev];
            slot = prev;
            if slot == 0 {
                break;
            }
        }
        for a in 1..=n {
            if owner[a] != usize::MAX {
                agent_of_task[owner[a]] = Some(a - 1);
            }
        }
    }

    let task_of_agent: Vec<usize> = (1..=n).map(|a| owner[a]).collect();
    if task_of_agent.iter().enumerate().any(|(i, &j)| !costs.is_allowed(i, j)) {
        return None;
    }
    let total = task_of_agent.iter().enumerate().map(|(i, &j)| costs.get(i, j)).sum();
    Some(IntLap {
        task_of_agent,
        u,
        v,
        total,
    })
}

/// Optimal matching with its exact dual certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HungarianSolution {
    pub matching: Matching,
    /// Duals of the cost form of the instance, `epsilon = 0`.
    pub duals: DualState,
    /// Sum objective on the instance's own weights (profit for profit instances).
    pub value: Rational,
}

impl HungarianSolution {
    /// Dual objective minus primal cost in cost form; zero for an optimal pair.
    pub fn duality_gap(&self, instance: &AssignmentInstance) -> Rational {
        let costs = instance.to_min_cost().instance;
        let primal = objective_value(&costs, &self.matching, ObjectiveKind::Sum).expect("shapes agree");
        primal - self.duals.dual_objective()
    }
}

pub fn solve_hungarian(instance: &AssignmentInstance) -> SolveResult<HungarianSolution> {
    if !instance.is_square() {
        return Err(SolveError::NotSquare {
            agents: instance.n_agents(),
            tasks: instance.n_tasks(),
        });
    }
    let costs = IntCosts::from_instance(&instance.to_min_cost().instance, &[])?;
    if let Some(i) = (0..costs.rows).find(|&i| (0..costs.cols).all(|j| !costs.is_allowed(i, j))) {
        return Err(SolveError::Infeasible(format!("agent {i} has no allowed task")));
    }
    let lap =
        solve_int(&costs).ok_or_else(|| SolveError::Infeasible("no perfect matching over allowed pairs".into()))?;
    let matching = Matching::from_permutation(&lap.task_of_agent)?;
    let value = objective_value(instance, &matching, ObjectiveKind::Sum)?;
    let duals = DualState::new(
        lap.u.iter().map(|&x| costs.to_rational(x)).collect(),
        lap.v.iter().map(|&x| costs.to_rational(x)).collect(),
        Rational::zero(),
    );
    Ok(HungarianSolution { matching, duals, value })
}
