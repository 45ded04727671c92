//! Whole-horizon runs, their trajectories and the metrics derived from them.

use fleetassign_model::rational::format_rational;
use fleetassign_model::{ObjectiveKind, Rational, RationalValue, Sense};
use num_traits::Zero;
use serde::Serialize;

use crate::clairvoyant::clairvoyant_optimum;
use crate::error::DynamicError;
use crate::policy::PerPeriodPolicy;
use crate::scenario::{Mode, Scenario};
use crate::state::{step, FleetState, ModelAgent};

/// Everything a run decided, with the availability bits it went through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub policy: String,
    pub horizon: usize,
    pub sense: Sense,
    pub mode: Mode,
    /// Model agents, including renewable re-entries.
    pub agents: Vec<ModelAgent>,
    pub task_arrivals: Vec<Option<usize>>,
    /// `decisions[tau - 1]` lists `(model agent, task)` with `x = 1`.
    pub decisions: Vec<Vec<(usize, usize)>>,
    /// `alpha[tau - 1][k]`, `beta[tau - 1][j]`.
    pub alpha: Vec<Vec<u8>>,
    pub beta: Vec<Vec<u8>>,
    pub per_period_values: Vec<Rational>,
    pub objective: ObjectiveKind,
    /// The policy's objective per period on the cost form of the period matrix.
    pub per_period_objective: Vec<Option<Rational>>,
    pub stranded_tasks: Vec<usize>,
    pub total: Rational,
}

impl Trajectory {
    pub fn assignments(&self) -> usize {
        self.decisions.iter().map(Vec::len).sum()
    }

    /// Sum of the per-period objective values that are defined.
    pub fn objective_total(&self) -> Rational {
        self.per_period_objective
            .iter()
            .flatten()
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    pub fn coverage(&self) -> Coverage {
        let arrived = self.task_arrivals.iter().filter(|a| a.is_some()).count();
        let mut served = vec![false; self.task_arrivals.len()];
        for &(_, j) in self.decisions.iter().flatten() {
            served[j] = true;
        }
        let served = served.iter().filter(|&&s| s).count();
        Coverage {
            arrived,
            served,
            stranded: arrived.saturating_sub(served),
            satisfied: served == arrived,
        }
    }

    /// `period,assignments,period_value,stranded_tasks` per period.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("period,assignments,period_value,stranded_tasks\n");
        for tau in 0..self.horizon {
            out.push_str(&format!(
                "{},{},{},{}\n",
                tau + 1,
                self.decisions[tau].len(),
                format_rational(&self.per_period_values[tau]),
                self.stranded_tasks[tau]
            ));
        }
        out
    }
}

/// Whether every task that arrived was served, as the cost model requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub arrived: usize,
    pub served: usize,
    pub stranded: usize,
    pub satisfied: bool,
}

pub fn run_scenario(scenario: &Scenario, policy: &mut dyn PerPeriodPolicy) -> Result<Trajectory, DynamicError> {
    if scenario.mode() == Mode::Reassign && scenario.demand().is_some() {
        return Err(DynamicError::Unsupported(
            "reassign mode with multi-agent task demand".into(),
        ));
    }
    let mut state = FleetState::initial(scenario);
    let horizon = scenario.horizon();
    let mut trajectory = Trajectory {
        policy: policy.name(),
        horizon,
        sense: scenario.sense(),
        mode: scenario.mode(),
        agents: Vec::new(),
        task_arrivals: scenario.task_arrivals().to_vec(),
        decisions: Vec::with_capacity(horizon),
        alpha: Vec::with_capacity(horizon),
        beta: Vec::with_capacity(horizon),
        per_period_values: Vec::with_capacity(horizon),
        objective: policy.objective(),
        per_period_objective: Vec::with_capacity(horizon),
        stranded_tasks: Vec::with_capacity(horizon),
        total: Rational::zero(),
    };
    while !state.is_finished(scenario) {
        trajectory.alpha.push(state.alpha.clone());
        trajectory.beta.push(state.beta.clone());
        let (outcome, next) = step(&state, scenario, policy)?;
        trajectory.total += outcome.value;
        trajectory.decisions.push(outcome.decisions);
        trajectory.per_period_values.push(outcome.value);
        trajectory.per_period_objective.push(outcome.objective);
        trajectory.stranded_tasks.push(outcome.stranded_tasks);
        state = next;
    }
    let model_agents = state.agents.len();
    for row in &mut trajectory.alpha {
        row.resize(model_agents, 0);
    }
    trajectory.agents = state.agents;
    Ok(trajectory)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub policy: String,
    pub mode: Mode,
    pub total: RationalValue,
    pub assignments: usize,
    pub coverage: Coverage,
    pub objective: String,
    pub objective_total: RationalValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clairvoyant: Option<RationalValue>,
    /// `clairvoyant - total` under profit, `total - clairvoyant` under cost.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regret: Option<RationalValue>,
}

/// Summary of a run; the clairvoyant reference is included when the
/// scenario is small enough for it.
pub fn summarize(scenario: &Scenario, trajectory: &Trajectory, with_clairvoyant: bool) -> RunSummary {
    let clairvoyant = if with_clairvoyant {
        clairvoyant_optimum(scenario).ok()
    } else {
        None
    };
    let regret = clairvoyant.map(|c| match scenario.sense() {
        Sense::MaximizeProfit => c - trajectory.total,
        Sense::MinimizeCost => trajectory.total - c,
    });
    RunSummary {
        policy: trajectory.policy.clone(),
        mode: trajectory.mode,
        total: RationalValue(trajectory.total),
        assignments: trajectory.assignments(),
        coverage: trajectory.coverage(),
        objective: trajectory.objective.to_string(),
        objective_total: RationalValue(trajectory.objective_total()),
        clairvoyant: clairvoyant.map(RationalValue),
        regret: regret.map(RationalValue),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModeComparison {
    pub commit_total: RationalValue,
    pub reassign_total: RationalValue,
    /// `reassign - commit`.
    pub gap: RationalValue,
}

/// Runs the scenario in both modes with fresh policies from `make_policy`.
pub fn compare_modes(
    scenario: &Scenario,
    mut make_policy: impl FnMut() -> Box<dyn PerPeriodPolicy>,
) -> Result<ModeComparison, DynamicError> {
    let commit = run_scenario(&scenario.clone().with_mode(Mode::Commit), make_policy().as_mut())?;
    let reassign = run_scenario(&scenario.clone().with_mode(Mode::Reassign), make_policy().as_mut())?;
    Ok(ModeComparison {
        commit_total: RationalValue(commit.total),
        reassign_total: RationalValue(reassign.total),
        gap: RationalValue(reassign.total - commit.total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{MyopicPolicy, NullPolicy};
    use fleetassign_model::int;

    fn two_period() -> Scenario {
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

    #[test]
    fn myopic_two_period() {
        let t = run_scenario(&two_period(), &mut MyopicPolicy).unwrap();
        assert_eq!(t.total, int(3));
        assert_eq!(t.decisions, vec![vec![(0, 0)], vec![]]);
        assert_eq!(t.alpha, vec![vec![1], vec![0]]);
        assert_eq!(t.beta, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(
            t.metrics_csv(),
            "period,assignments,period_value,stranded_tasks\n1,1,3,0\n2,0,0,1\n"
        );
        let summary = summarize(&two_period(), &t, true);
        assert_eq!(summary.clairvoyant, Some(RationalValue(int(10))));
        assert_eq!(summary.regret, Some(RationalValue(int(7))));
    }

    #[test]
    fn null_policy_total_zero() {
        let t = run_scenario(&two_period(), &mut NullPolicy).unwrap();
        assert_eq!(t.total, int(0));
        let coverage = t.coverage();
        assert_eq!((coverage.arrived, coverage.served, coverage.stranded), (2, 0, 2));
        assert!(!coverage.satisfied);
    }

    #[test]
    fn reassign_mode_can_wait_for_a_better_task() {
        // agent 0 tentatively takes task 0 at period 1 (eta 1); task 1 shows up
        // at period 2 with a much higher utility and the agent switches
        let utilities = vec![int(3), int(0), int(3), int(10), int(3), int(10)];
        let s = Scenario::new(
            3,
            vec![Some(1)],
            vec![Some(1), Some(2)],
            utilities,
            Sense::MaximizeProfit,
        )
        .unwrap()
        .with_etas(vec![1, 0])
        .unwrap();
        let cmp = compare_modes(&s, || Box::new(MyopicPolicy)).unwrap();
        assert_eq!(cmp.commit_total, RationalValue(int(3)));
        assert_eq!(cmp.reassign_total, RationalValue(int(10)));
        assert_eq!(cmp.gap, RationalValue(int(7)));
    }
}
