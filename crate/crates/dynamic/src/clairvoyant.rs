//! Offline optimum of the multi-period model with every arrival known.
//!
//! In a nonrenewable fleet, a pair `(i, j)` can be assigned in any period
//! from `max(arrival_i, arrival_j)` to the horizon, and different pairs do not
//! interact beyond each agent and task being used once. The search
//! enumerates every partial agent-to-task map and picks the best period for
//! each pair.

use fleetassign_model::{Rational, Sense};
use num_traits::Zero;

use crate::error::DynamicError;
use crate::scenario::Scenario;

/// Largest number of arriving agents plus arriving tasks accepted.
pub const CLAIRVOYANT_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClairvoyantPlan {
    pub value: Rational,
    /// `(agent, task, period)`.
    pub decisions: Vec<(usize, usize, usize)>,
}

pub fn clairvoyant_optimum(scenario: &Scenario) -> Result<Rational, DynamicError> {
    clairvoyant_plan(scenario).map(|plan| plan.value)
}

pub fn clairvoyant_plan(scenario: &Scenario) -> Result<ClairvoyantPlan, DynamicError> {
    if scenario.is_renewable() || scenario.demand().is_some() {
        return Err(DynamicError::Unsupported(
            "clairvoyant search covers nonrenewable unit-demand scenarios".into(),
        ));
    }
    let agents: Vec<usize> = (0..scenario.n_agents())
        .filter(|&i| scenario.agent_arrival(i).is_some())
        .collect();
    let tasks: Vec<usize> = (0..scenario.n_tasks())
        .filter(|&j| scenario.task_arrival(j).is_some())
        .collect();
    if agents.len() + tasks.len() > CLAIRVOYANT_LIMIT {
        return Err(DynamicError::GuardExceeded(format!(
            "{} agents + {} tasks exceed the clairvoyant limit of {CLAIRVOYANT_LIMIT}",
            agents.len(),
            tasks.len()
        )));
    }
    let maximize = scenario.sense() == Sense::MaximizeProfit;
    // best period and value for each pair
    let best: Vec<Vec<(usize, Rational)>> = agents
        .iter()
        .map(|&i| {
            tasks
                .iter()
                .map(|&j| {
                    let from = scenario
                        .agent_arrival(i)
                        .unwrap()
                        .max(scenario.task_arrival(j).unwrap());
                    (from..=scenario.horizon())
                        .map(|tau| (tau, scenario.utility(i, j, tau)))
                        .reduce(|a, b| {
                            let better = if maximize { b.1 > a.1 } else { b.1 < a.1 };
                            if better {
                                b
                            } else {
                                a
                            }
                        })
                        .expect("arrivals lie within the horizon")
                })
                .collect()
        })
        .collect();

    let mut search = Search {
        best: &best,
        maximize,
        used: vec![false; tasks.len()],
        chosen: Vec::new(),
        incumbent: None,
    };
    search.visit(0, 0, Rational::zero());
    let (_, value, chosen) = search.incumbent.expect("the empty plan is always feasible");
    let decisions = chosen
        .into_iter()
        .map(|(a, t)| (agents[a], tasks[t], best[a][t].0))
        .collect();
    Ok(ClairvoyantPlan { value, decisions })
}

/// Pair count, value and the chosen `(agent, task)` indices.
type Plan = (usize, Rational, Vec<(usize, usize)>);

struct Search<'a> {
    best: &'a [Vec<(usize, Rational)>],
    maximize: bool,
    used: Vec<bool>,
    chosen: Vec<(usize, usize)>,
    incumbent: Option<Plan>,
}

impl Search<'_> {
    /// Profit plans compare by value; cost plans serve as many tasks as
    /// possible first, then compare by cost.
    fn improves(&self, pairs: usize, value: Rational) -> bool {
        match &self.incumbent {
            None => true,
            Some((p, v, _)) if self.maximize => value > *v || (value == *v && pairs < *p),
            Some((p, v, _)) => pairs > *p || (pairs == *p && value < *v),
        }
    }

    fn visit(&mut self, agent: usize, pairs: usize, value: Rational) {
        if agent == self.best.len() {
            if self.improves(pairs, value) {
                self.incumbent = Some((pairs, value, self.chosen.clone()));
            }
            return;
        }
        self.visit(agent + 1, pairs, value);
        for task in 0..self.used.len() {
            if self.used[task] {
                continue;
            }
            self.used[task] = true;
            self.chosen.push((agent, task));
            self.visit(agent + 1, pairs + 1, value + self.best[agent][task].1);
            self.chosen.pop();
            self.used[task] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::int;

    #[test]
    fn waits_for_the_better_task() {
        let utilities = vec![int(3), int(0), int(0), int(10)];
        let s = Scenario::new(
            2,
            vec![Some(1)],
            vec![Some(1), Some(2)],
            utilities,
            Sense::MaximizeProfit,
        )
        .unwrap();
        let plan = clairvoyant_plan(&s).unwrap();
        assert_eq!(plan.value, int(10));
        assert_eq!(plan.decisions, vec![(0, 1, 2)]);
    }

    #[test]
    fn decoupled_pairs_add_up() {
        // agent i and task i arrive together at period i + 1
        let (n, h) = (3, 3);
        let mut utilities = vec![int(0); h * n * n];
        for tau in 1..=h {
            for i in 0..n {
                utilities[(tau - 1) * n * n + i * n + i] = int((tau * 10 + i) as i64);
            }
        }
        let arrivals: Vec<Option<usize>> = (0..n).map(|i| Some(i + 1)).collect();
        let s = Scenario::new(h, arrivals.clone(), arrivals, utilities, Sense::MaximizeProfit).unwrap();
        // each pair peaks in the last period: 30 + 31 + 32
        assert_eq!(clairvoyant_optimum(&s).unwrap(), int(93));
    }

    #[test]
    fn guard() {
        let s = Scenario::new(
            1,
            vec![Some(1); 6],
            vec![Some(1); 5],
            vec![int(1); 30],
            Sense::MaximizeProfit,
        )
        .unwrap();
        assert!(matches!(clairvoyant_optimum(&s), Err(DynamicError::GuardExceeded(_))));
    }

    #[test]
    fn cost_sense_covers_first() {
        let s = Scenario::new(
            1,
            vec![Some(1); 2],
            vec![Some(1); 2],
            vec![int(5), int(1), int(1), int(9)],
            Sense::MinimizeCost,
        )
        .unwrap();
        assert_eq!(clairvoyant_optimum(&s).unwrap(), int(2));
    }
}
