//! Fleet state and the single-period transition.

use fleetassign_model::{AssignmentInstance, Rational};
use num_traits::Zero;
use serde::Serialize;

use crate::error::DynamicError;
use crate::policy::{period_objective, PerPeriodPolicy, PeriodView};
use crate::scenario::{Mode, Scenario};

/// An agent as the model sees it. A renewable agent that finishes a task
/// comes back as a new model agent with the same origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelAgent {
    pub origin: usize,
    pub arrival: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum Lifecycle {
    Idle,
    /// Heading to `task`, arriving in `eta` periods. Revisable in reassign mode.
    Assigned {
        task: usize,
        eta: usize,
    },
    /// Serving `task` for `remaining` more periods.
    Assisting {
        task: usize,
        remaining: usize,
    },
    /// Used up in a nonrenewable fleet.
    Retired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Engagement {
    task: usize,
    start: usize,
    eta: usize,
    duration: usize,
    renewable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pending {
    agent: usize,
    task: usize,
    lock_period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FleetState {
    /// The next period to decide, from 1; `horizon + 1` once finished.
    pub period: usize,
    pub agents: Vec<ModelAgent>,
    /// `alpha[k]` for model agent `k` at `period`.
    pub alpha: Vec<u8>,
    /// `beta[j]` for task `j` at `period`.
    pub beta: Vec<u8>,
    engagements: Vec<Option<Engagement>>,
    pending: Vec<Pending>,
}

/// What happened in one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodOutcome {
    pub period: usize,
    /// Final decisions `x_{kj} = 1` as `(model agent, task)`.
    pub decisions: Vec<(usize, usize)>,
    /// Tentative pairs still waiting for their ETA (reassign mode).
    pub tentative: Vec<(usize, usize)>,
    pub value: Rational,
    pub objective: Option<Rational>,
    /// Tasks available this period and left unserved.
    pub stranded_tasks: usize,
}

impl FleetState {
    pub fn initial(scenario: &Scenario) -> Self {
        let agents: Vec<ModelAgent> = scenario
            .agent_arrivals()
            .iter()
            .enumerate()
            .map(|(origin, &arrival)| ModelAgent { origin, arrival })
            .collect();
        Self {
            period: 1,
            alpha: agents.iter().map(|a| u8::from(a.arrival == Some(1))).collect(),
            beta: scenario
                .task_arrivals()
                .iter()
                .map(|&a| u8::from(a == Some(1)))
                .collect(),
            agents,
            engagements: vec![None; scenario.n_agents()],
            pending: Vec::new(),
        }
    }

    pub fn is_finished(&self, scenario: &Scenario) -> bool {
        self.period > scenario.horizon()
    }

    /// Lifecycle of every scenario agent at the current period.
    pub fn lifecycle(&self) -> Vec<Lifecycle> {
        let tau = self.period;
        self.engagements
            .iter()
            .enumerate()
            .map(|(origin, engagement)| {
                if let Some(p) = self.pending.iter().find(|p| self.agents[p.agent].origin == origin) {
                    return Lifecycle::Assigned {
                        task: p.task,
                        eta: p.lock_period.saturating_sub(tau),
                    };
                }
                match engagement {
                    None => Lifecycle::Idle,
                    Some(e) if tau < e.start + e.eta => Lifecycle::Assigned {
                        task: e.task,
                        eta: e.start + e.eta - tau,
                    },
                    Some(e) if tau < e.start + e.eta + e.duration => Lifecycle::Assisting {
                        task: e.task,
                        remaining: e.start + e.eta + e.duration - tau,
                    },
                    Some(e) if e.renewable => Lifecycle::Idle,
                    Some(_) => Lifecycle::Retired,
                }
            })
            .collect()
    }

    /// Agents and tasks available now, in index order.
    pub fn available(&self) -> (Vec<usize>, Vec<usize>) {
        let agents = (0..self.alpha.len()).filter(|&k| self.alpha[k] == 1).collect();
        let tasks = (0..self.beta.len()).filter(|&j| self.beta[j] == 1).collect();
        (agents, tasks)
    }

    fn view(&self, scenario: &Scenario, agents: &[usize], tasks: &[usize]) -> Result<PeriodView, DynamicError> {
        let tau = self.period;
        let rows: Vec<Vec<Rational>> = agents
            .iter()
            .map(|&k| {
                tasks
                    .iter()
                    .map(|&j| scenario.utility(self.agents[k].origin, j, tau))
                    .collect()
            })
            .collect();
        let incumbent = self
            .pending
            .iter()
            .filter_map(|p| {
                let row = agents.iter().position(|&k| k == p.agent)?;
                let col = tasks.iter().position(|&j| j == p.task)?;
                Some((row, col))
            })
            .collect();
        Ok(PeriodView {
            period: tau,
            agents: agents.to_vec(),
            agent_origin: agents.iter().map(|&k| self.agents[k].origin).collect(),
            tasks: tasks.to_vec(),
            weights: AssignmentInstance::new(rows, scenario.sense())?,
            demand: tasks.iter().map(|&j| scenario.task_demand(j)).collect(),
            incumbent,
        })
    }
}

fn check_choice(view: &PeriodView, chosen: &[(usize, usize)]) -> Result<(), DynamicError> {
    let (rows, cols) = (view.agents.len(), view.tasks.len());
    let mut row_used = vec![false; rows];
    let mut col_count = vec![0usize; cols];
    for &(r, c) in chosen {
        if r >= rows || c >= cols {
            return Err(DynamicError::ConstraintViolation(format!(
                "pair ({r}, {c}) outside the {rows}x{cols} period matrix"
            )));
        }
        if std::mem::replace(&mut row_used[r], true) {
            return Err(DynamicError::ConstraintViolation(format!(
                "agent {} assigned twice in period {}",
                view.agents[r], view.period
            )));
        }
        col_count[c] += 1;
        if col_count[c] > view.demand[c] {
            return Err(DynamicError::ConstraintViolation(format!(
                "task {} over-assigned in period {}",
                view.tasks[c], view.period
            )));
        }
    }
    Ok(())
}

/// Asks `policy` for this period's decisions and applies them. On a
/// conflicting decision the error is returned and `state` is untouched.
pub fn step(
    state: &FleetState,
    scenario: &Scenario,
    policy: &mut dyn PerPeriodPolicy,
) -> Result<(PeriodOutcome, FleetState), DynamicError> {
    let tau = state.period;
    let horizon = scenario.horizon();
    if tau > horizon {
        return Err(DynamicError::InvalidScenario(format!(
            "period {tau} is past the horizon {horizon}"
        )));
    }
    let (agents, tasks) = state.available();
    let (view, chosen) = if agents.is_empty() || tasks.is_empty() {
        (None, Vec::new())
    } else {
        let view = state.view(scenario, &agents, &tasks)?;
        let chosen = policy.decide(&view)?;
        check_choice(&view, &chosen)?;
        (Some(view), chosen)
    };

    let mut next = state.clone();
    let mut locked_rows = Vec::new();
    let mut tentative = Vec::new();
    next.pending.clear();
    for &(r, c) in &chosen {
        let (k, j) = (agents[r], tasks[c]);
        let lock_period = match scenario.mode() {
            Mode::Commit => tau,
            Mode::Reassign => state
                .pending
                .iter()
                .find(|p| p.agent == k && p.task == j)
                .map_or(tau + scenario.eta(state.agents[k].origin, j), |p| p.lock_period),
        };
        if lock_period <= tau || tau == horizon {
            locked_rows.push((r, c));
        } else {
            tentative.push((k, j));
            next.pending.push(Pending {
                agent: k,
                task: j,
                lock_period,
            });
        }
    }
    let decisions: Vec<(usize, usize)> = locked_rows.iter().map(|&(r, c)| (agents[r], tasks[c])).collect();
    let value = decisions.iter().fold(Rational::zero(), |acc, &(k, j)| {
        acc + scenario.utility(state.agents[k].origin, j, tau)
    });
    let objective = view
        .as_ref()
        .and_then(|v| period_objective(v, &locked_rows, policy.objective()));

    let mut served = vec![false; scenario.n_tasks()];
    for &(k, j) in &decisions {
        served[j] = true;
        next.alpha[k] = 0;
        let origin = state.agents[k].origin;
        let eta = match scenario.mode() {
            Mode::Commit => scenario.eta(origin, j),
            Mode::Reassign => 0,
        };
        let duration = scenario.service_duration(origin, j);
        next.engagements[origin] = Some(Engagement {
            task: j,
            start: tau,
            eta,
            duration: duration.unwrap_or(0),
            renewable: duration.is_some(),
        });
        if let Some(s) = duration {
            let reentry = tau + (eta + s).max(1);
            if reentry <= horizon {
                next.agents.push(ModelAgent {
                    origin,
                    arrival: Some(reentry),
                });
                next.alpha.push(0);
            }
        }
    }
    let stranded_tasks = tasks.iter().filter(|&&j| !served[j]).count();
    for (beta, _) in next.beta.iter_mut().zip(&served).filter(|(_, &s)| s) {
        *beta = 0;
    }

    next.period = tau + 1;
    for (k, agent) in next.agents.iter().enumerate() {
        if agent.arrival == Some(tau + 1) {
            next.alpha[k] = 1;
        }
    }
    for (j, &arrival) in scenario.task_arrivals().iter().enumerate() {
        if arrival == Some(tau + 1) {
            next.beta[j] = 1;
        }
    }
    let outcome = PeriodOutcome {
        period: tau,
        decisions,
        tentative,
        value,
        objective,
        stranded_tasks,
    };
    Ok((outcome, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{MyopicPolicy, NullPolicy};
    use fleetassign_model::{int, Sense};

    fn two_period() -> Scenario {
        // one agent at 1; task 0 at 1 (p = 3), task 1 at 2 (p = 10)
        let utilities = vec![int(3), int(0), int(0), int(10)];
        Scenario::new(
            2,
            vec![Some(1)],
            vec![Some(1), Some(2)],
            utilities,
            Sense::MaximizeProfit,
        )
        .unwrap()
    }

    struct Rogue;

    impl PerPeriodPolicy for Rogue {
        fn name(&self) -> String {
            "rogue".into()
        }

        fn decide(&mut self, _view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError> {
            Ok(vec![(0, 0), (0, 0)])
        }
    }

    #[test]
    fn empty_period_advances() {
        let s = Scenario::new(2, vec![Some(2)], vec![Some(2)], vec![int(1); 2], Sense::MaximizeProfit).unwrap();
        let state = FleetState::initial(&s);
        let (outcome, next) = step(&state, &s, &mut MyopicPolicy).unwrap();
        assert!(outcome.decisions.is_empty());
        assert_eq!(next.period, 2);
        assert_eq!(next.alpha, vec![1]);
        assert_eq!(next.beta, vec![1]);
    }

    #[test]
    fn myopic_takes_the_first_task() {
        let s = two_period();
        let state = FleetState::initial(&s);
        let (first, state) = step(&state, &s, &mut MyopicPolicy).unwrap();
        assert_eq!(first.decisions, vec![(0, 0)]);
        assert_eq!(first.value, int(3));
        assert_eq!(state.alpha, vec![0]);
        assert_eq!(state.beta, vec![0, 1]);
        assert_eq!(state.lifecycle(), vec![Lifecycle::Retired]);
        let (second, _) = step(&state, &s, &mut MyopicPolicy).unwrap();
        assert!(second.decisions.is_empty());
        assert_eq!(second.stranded_tasks, 1);
    }

    #[test]
    fn conflicting_policy_is_rejected() {
        let s = two_period();
        let state = FleetState::initial(&s);
        let before = state.clone();
        let err = step(&state, &s, &mut Rogue).unwrap_err();
        assert!(matches!(err, DynamicError::ConstraintViolation(_)));
        assert!(err.to_string().starts_with("constraint violation"));
        assert_eq!(state, before);
    }

    #[test]
    fn null_policy_strands_everything() {
        let s = two_period();
        let (outcome, next) = step(&FleetState::initial(&s), &s, &mut NullPolicy).unwrap();
        assert_eq!(outcome.stranded_tasks, 1);
        assert_eq!(next.beta, vec![1, 1]);
    }

    #[test]
    fn renewable_agent_reenters() {
        let s = Scenario::new(
            3,
            vec![Some(1)],
            vec![Some(1), Some(2)],
            vec![int(5); 6],
            Sense::MaximizeProfit,
        )
        .unwrap()
        .with_etas(vec![0, 0])
        .unwrap()
        .with_service_durations(vec![1, 1])
        .unwrap();
        let state = FleetState::initial(&s);
        let (_, state) = step(&state, &s, &mut MyopicPolicy).unwrap();
        assert_eq!(state.agents.len(), 2);
        assert_eq!(
            state.agents[1],
            ModelAgent {
                origin: 0,
                arrival: Some(2)
            }
        );
        assert_eq!(state.alpha, vec![0, 1]);
        let (second, _) = step(&state, &s, &mut MyopicPolicy).unwrap();
        assert_eq!(second.decisions, vec![(1, 1)]);
    }

    #[test]
    fn reassign_waits_for_eta() {
        let s = Scenario::new(3, vec![Some(1)], vec![Some(1)], vec![int(4); 3], Sense::MaximizeProfit)
            .unwrap()
            .with_mode(Mode::Reassign)
            .with_etas(vec![1])
            .unwrap();
        let state = FleetState::initial(&s);
        let (first, state) = step(&state, &s, &mut MyopicPolicy).unwrap();
        assert!(first.decisions.is_empty());
        assert_eq!(first.tentative, vec![(0, 0)]);
        assert_eq!(state.lifecycle(), vec![Lifecycle::Assigned { task: 0, eta: 0 }]);
        assert_eq!(state.alpha, vec![1]);
        let (second, state) = step(&state, &s, &mut MyopicPolicy).unwrap();
        assert_eq!(second.decisions, vec![(0, 0)]);
        assert_eq!(state.alpha, vec![0]);
    }
}
