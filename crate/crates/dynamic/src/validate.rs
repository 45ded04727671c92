//! Checks a recorded trajectory against every constraint of the dynamic model.

use fleetassign_model::Rational;
use num_traits::Zero;
use serde::Serialize;

use crate::run::{Coverage, Trajectory};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintFamily {
    /// `alpha`, `beta` and `x` take values in {0, 1}; shapes and indices agree.
    Binary,
    /// `sum_j x_kj <= alpha_k` and `sum_k x_kj <= d_j beta_j` each period.
    Availability,
    /// The update identities for `alpha` and `beta`.
    Conservation,
    /// `alpha_k1 = A_k1` and `beta_j1 = T_j1`.
    InitialConditions,
    /// Every agent and task enters once; re-entries only in a renewable fleet.
    Nonrenewability,
    /// Period values and the total match the decisions.
    Objective,
}

impl ConstraintFamily {
    pub const ALL: [ConstraintFamily; 6] = [
        ConstraintFamily::Binary,
        ConstraintFamily::Availability,
        ConstraintFamily::Conservation,
        ConstraintFamily::InitialConditions,
        ConstraintFamily::Nonrenewability,
        ConstraintFamily::Objective,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Entity {
    Agent,
    Task,
    Period,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub entity: Entity,
    pub index: usize,
    pub period: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub family: ConstraintFamily,
    pub passed: bool,
    pub first_violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub families: Vec<FamilyReport>,
    pub coverage: Coverage,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }

    pub fn family(&self, family: ConstraintFamily) -> &FamilyReport {
        self.families
            .iter()
            .find(|f| f.family == family)
            .expect("every family is reported")
    }
}

struct Checker<'a> {
    scenario: &'a Scenario,
    t: &'a Trajectory,
    /// `agent_load[tau - 1][k]`, `task_load[tau - 1][j]`: decisions per period.
    agent_load: Vec<Vec<usize>>,
    task_load: Vec<Vec<usize>>,
}

fn violation(entity: Entity, index: usize, period: usize, detail: impl Into<String>) -> Option<Violation> {
    Some(Violation {
        entity,
        index,
        period,
        detail: detail.into(),
    })
}

impl Checker<'_> {
    fn agent_arrives(&self, k: usize, tau: usize) -> u8 {
        u8::from(self.t.agents[k].arrival == Some(tau))
    }

    fn task_arrives(&self, j: usize, tau: usize) -> u8 {
        u8::from(self.scenario.task_arrival(j) == Some(tau))
    }

    fn binary(&self) -> Option<Violation> {
        let (h, k_count, m) = (self.scenario.horizon(), self.t.agents.len(), self.scenario.n_tasks());
        if self.t.horizon != h || self.t.decisions.len() != h || self.t.alpha.len() != h || self.t.beta.len() != h {
            return violation(Entity::Period, 0, 0, "trajectory does not cover the horizon");
        }
        for tau in 1..=h {
            if self.t.alpha[tau - 1].len() != k_count || self.t.beta[tau - 1].len() != m {
                return violation(Entity::Period, tau, tau, "availability vector has the wrong length");
            }
            if let Some(k) = self.t.alpha[tau - 1].iter().position(|&a| a > 1) {
                return violation(Entity::Agent, k, tau, "alpha outside {0, 1}");
            }
            if let Some(j) = self.t.beta[tau - 1].iter().position(|&b| b > 1) {
                return violation(Entity::Task, j, tau, "beta outside {0, 1}");
            }
            let mut seen = std::collections::HashSet::new();
            for &(k, j) in &self.t.decisions[tau - 1] {
                if k >= k_count {
                    return violation(Entity::Agent, k, tau, "decision names an unknown agent");
                }
                if j >= m {
                    return violation(Entity::Task, j, tau, "decision names an unknown task");
                }
                if !seen.insert((k, j)) {
                    return violation(Entity::Agent, k, tau, format!("x for task {j} exceeds 1"));
                }
            }
        }
        None
    }

    fn availability(&self) -> Option<Violation> {
        for tau in 1..=self.scenario.horizon() {
            for (k, &load) in self.agent_load[tau - 1].iter().enumerate() {
                if load > usize::from(self.t.alpha[tau - 1][k]) {
                    return violation(
                        Entity::Agent,
                        k,
                        tau,
                        format!("assigned {load} time(s) with alpha = {}", self.t.alpha[tau - 1][k]),
                    );
                }
            }
            for (j, &load) in self.task_load[tau - 1].iter().enumerate() {
                let cap = self.scenario.task_demand(j) * usize::from(self.t.beta[tau - 1][j]);
                if load > cap {
                    return violation(
                        Entity::Task,
                        j,
                        tau,
                        format!("served by {load} agent(s), capacity {cap}"),
                    );
                }
            }
        }
        None
    }

    fn conservation(&self) -> Option<Violation> {
        for tau in 1..self.scenario.horizon() {
            for k in 0..self.t.agents.len() {
                let expected = i64::from(self.t.alpha[tau - 1][k]) - self.agent_load[tau - 1][k] as i64
                    + i64::from(self.agent_arrives(k, tau + 1));
                let actual = i64::from(self.t.alpha[tau][k]);
                if actual != expected {
                    return violation(
                        Entity::Agent,
                        k,
                        tau + 1,
                        format!("alpha is {actual}, identity gives {expected}"),
                    );
                }
            }
            for j in 0..self.scenario.n_tasks() {
                let d = self.scenario.task_demand(j) as i64;
                let expected = d * i64::from(self.t.beta[tau - 1][j]) - self.task_load[tau - 1][j] as i64
                    + d * i64::from(self.task_arrives(j, tau + 1));
                let actual = d * i64::from(self.t.beta[tau][j]);
                if actual != expected {
                    return violation(
                        Entity::Task,
                        j,
                        tau + 1,
                        format!("d * beta is {actual}, identity gives {expected}"),
                    );
                }
            }
        }
        None
    }

    fn initial_conditions(&self) -> Option<Violation> {
        for k in 0..self.t.agents.len() {
            if self.t.alpha[0][k] != self.agent_arrives(k, 1) {
                return violation(
                    Entity::Agent,
                    k,
                    1,
                    "alpha at period 1 differs from the arrival indicator",
                );
            }
        }
        for j in 0..self.scenario.n_tasks() {
            if self.t.beta[0][j] != self.task_arrives(j, 1) {
                return violation(
                    Entity::Task,
                    j,
                    1,
                    "beta at period 1 differs from the arrival indicator",
                );
            }
        }
        None
    }

    fn nonrenewability(&self) -> Option<Violation> {
        let n = self.scenario.n_agents();
        if self.t.agents.len() < n || self.t.task_arrivals.as_slice() != self.scenario.task_arrivals() {
            return violation(Entity::Period, 0, 0, "trajectory arrivals do not match the scenario");
        }
        // last period in which each origin was assigned
        let mut last_assignment: Vec<Option<usize>> = vec![None; n];
        let mut assigned_at: Vec<Option<usize>> = vec![None; self.t.agents.len()];
        let mut task_served = vec![0usize; self.scenario.n_tasks()];
        for (tau, decisions) in self.t.decisions.iter().enumerate() {
            for &(k, j) in decisions {
                if assigned_at[k].replace(tau + 1).is_some() {
                    return violation(Entity::Agent, k, tau + 1, "model agent assigned twice");
                }
                task_served[j] += 1;
                if task_served[j] > self.scenario.task_demand(j) {
                    return violation(Entity::Task, j, tau + 1, "task served more than once");
                }
            }
        }
        for (k, agent) in self.t.agents.iter().enumerate() {
            let arrival = agent.arrival;
            if k < n {
                if agent.origin != k || arrival != self.scenario.agent_arrival(k) {
                    return violation(
                        Entity::Agent,
                        k,
                        arrival.unwrap_or(0),
                        "first entry differs from the scenario",
                    );
                }
            } else {
                let Some(period) = arrival else {
                    return violation(Entity::Agent, k, 0, "re-entry without an arrival period");
                };
                if !self.scenario.is_renewable() || agent.origin >= n {
                    return violation(Entity::Agent, k, period, "agent enters a nonrenewable fleet twice");
                }
                match last_assignment[agent.origin] {
                    Some(done) if done < period => {}
                    _ => {
                        return violation(
                            Entity::Agent,
                            k,
                            period,
                            "re-entry before the previous task was assigned",
                        )
                    }
                }
            }
            last_assignment[agent.origin] = assigned_at[k];
        }
        None
    }

    fn objective(&self) -> Option<Violation> {
        let mut total = Rational::zero();
        for (tau, decisions) in self.t.decisions.iter().enumerate() {
            let value = decisions.iter().fold(Rational::zero(), |acc, &(k, j)| {
                acc + self.scenario.utility(self.t.agents[k].origin, j, tau + 1)
            });
            if self.t.per_period_values.get(tau) != Some(&value) {
                return violation(
                    Entity::Period,
                    tau + 1,
                    tau + 1,
                    format!("period value should be {value}"),
                );
            }
            total += value;
        }
        if total != self.t.total {
            return violation(
                Entity::Period,
                0,
                self.scenario.horizon(),
                format!("total should be {total}"),
            );
        }
        None
    }
}

/// Checks every constraint family; a failed family reports its first
/// violation in period order.
pub fn validate_trajectory(scenario: &Scenario, trajectory: &Trajectory) -> ValidationReport {
    let h = scenario.horizon();
    let k_count = trajectory.agents.len();
    let m = scenario.n_tasks();
    let mut agent_load = vec![vec![0usize; k_count]; h];
    let mut task_load = vec![vec![0usize; m]; h];
    for (tau, decisions) in trajectory.decisions.iter().enumerate().take(h) {
        for &(k, j) in decisions {
            if k < k_count && j < m {
                agent_load[tau][k] += 1;
                task_load[tau][j] += 1;
            }
        }
    }
    let checker = Checker {
        scenario,
        t: trajectory,
        agent_load,
        task_load,
    };
    let binary = checker.binary();
    let shapes_ok = binary.is_none();
    let families = ConstraintFamily::ALL
        .iter()
        .map(|&family| {
            let first_violation = match family {
                ConstraintFamily::Binary => binary.clone(),
                // the remaining checks index by shape, so they only run on sound input
                _ if !shapes_ok => violation(Entity::Period, 0, 0, "skipped: trajectory shape is invalid"),
                ConstraintFamily::Availability => checker.availability(),
                ConstraintFamily::Conservation => checker.conservation(),
                ConstraintFamily::InitialConditions => checker.initial_conditions(),
                ConstraintFamily::Nonrenewability => checker.nonrenewability(),
                ConstraintFamily::Objective => checker.objective(),
            };
            FamilyReport {
                family,
                passed: first_violation.is_none(),
                first_violation,
            }
        })
        .collect();
    ValidationReport {
        families,
        coverage: trajectory.coverage(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::MyopicPolicy;
    use crate::run::run_scenario;
    use crate::scenario::{random_scenario, ScenarioParams};

    fn sample() -> (Scenario, Trajectory) {
        let s = random_scenario(&ScenarioParams::new(4, 4, 3), 3).unwrap();
        let t = run_scenario(&s, &mut MyopicPolicy).unwrap();
        (s, t)
    }

    #[test]
    fn run_output_passes() {
        let (s, t) = sample();
        let report = validate_trajectory(&s, &t);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn unavailable_agent_is_caught() {
        let (s, mut t) = sample();
        // an agent that has not arrived in period 1
        let k = (0..t.agents.len())
            .find(|&k| t.alpha[0][k] == 0)
            .expect("some late agent");
        let j = 0;
        t.decisions[0].retain(|&(_, task)| task != j);
        t.decisions[0].push((k, j));
        let report = validate_trajectory(&s, &t);
        let availability = report.family(ConstraintFamily::Availability);
        assert!(!availability.passed);
        let v = availability.first_violation.as_ref().unwrap();
        assert_eq!((v.entity, v.index, v.period), (Entity::Agent, k, 1));
    }

    #[test]
    fn alpha_bookkeeping_is_caught() {
        let (s, mut t) = sample();
        let k = 0;
        t.alpha[1][k] ^= 1;
        let report = validate_trajectory(&s, &t);
        assert!(!report.family(ConstraintFamily::Conservation).passed);
    }

    #[test]
    fn non_binary_value_is_caught() {
        let (s, mut t) = sample();
        t.beta[0][0] = 2;
        let report = validate_trajectory(&s, &t);
        assert!(!report.family(ConstraintFamily::Binary).passed);
        assert!(!report.all_passed());
    }
}
