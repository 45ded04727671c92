//! Scenarios: arrival periods, per-period utilities and the optional
//! service model, plus the scenario file format and a seeded generator.

use std::fmt;
use std::str::FromStr;

use fleetassign_model::generate::rng_from_seed;
use fleetassign_model::{int, AssignmentInstance, Rational, RationalValue, Sense};
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::DynamicError;

/// Upper bound on `horizon * agents * tasks` for one scenario.
pub const MAX_CELLS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// An assignment is final in the period it is made.
    #[default]
    Commit,
    /// An assignment stays tentative, and revisable, until its ETA elapses.
    Reassign,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Commit => "commit",
            Mode::Reassign => "reassign",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "commit" => Ok(Mode::Commit),
            "reassign" => Ok(Mode::Reassign),
            other => Err(format!("unknown mode {other:?} (expected commit or reassign)")),
        }
    }
}

/// Travel and service times per agent-task pair, in periods. When present
/// the fleet is renewable: an agent that finishes a task comes back as a new
/// arrival.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceModel {
    pub eta: Vec<usize>,
    pub duration: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    horizon: usize,
    agent_arrivals: Vec<Option<usize>>,
    task_arrivals: Vec<Option<usize>>,
    /// Indexed `[(period - 1) * n * m + agent * m + task]`.
    utilities: Vec<Rational>,
    sense: Sense,
    mode: Mode,
    seed: u64,
    etas: Option<Vec<usize>>,
    service: Option<Vec<usize>>,
    demand: Option<Vec<usize>>,
}

impl Scenario {
    /// `utilities[period - 1][agent][task]`; arrivals are periods in `1..=horizon`.
    pub fn new(
        horizon: usize,
        agent_arrivals: Vec<Option<usize>>,
        task_arrivals: Vec<Option<usize>>,
        utilities: Vec<Rational>,
        sense: Sense,
    ) -> Result<Self, DynamicError> {
        let (n, m) = (agent_arrivals.len(), task_arrivals.len());
        if horizon == 0 {
            return Err(DynamicError::InvalidScenario("horizon must be at least 1".into()));
        }
        let cells = horizon
            .checked_mul(n)
            .and_then(|x| x.checked_mul(m))
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| {
                DynamicError::InvalidScenario(format!("{horizon} x {n} x {m} utilities exceed {MAX_CELLS}"))
            })?;
        if utilities.len() != cells {
            return Err(DynamicError::InvalidScenario(format!(
                "expected {cells} utilities, got {}",
                utilities.len()
            )));
        }
        for (kind, arrivals) in [("agent", &agent_arrivals), ("task", &task_arrivals)] {
            if let Some((index, period)) = arrivals
                .iter()
                .enumerate()
                .find_map(|(k, a)| a.filter(|&p| p == 0 || p > horizon).map(|p| (k, p)))
            {
                return Err(DynamicError::InvalidScenario(format!(
                    "{kind} {index} arrives in period {period}, outside 1..={horizon}"
                )));
            }
        }
        Ok(Self {
            horizon,
            agent_arrivals,
            task_arrivals,
            utilities,
            sense,
            mode: Mode::Commit,
            seed: 0,
            etas: None,
            service: None,
            demand: None,
        })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Per-pair ETAs, used by reassign mode and by renewable re-entry.
    pub fn with_etas(mut self, etas: Vec<usize>) -> Result<Self, DynamicError> {
        self.check_pair_vector("eta", &etas)?;
        self.etas = Some(etas);
        Ok(self)
    }

    /// Per-pair service durations; makes the fleet renewable.
    pub fn with_service_durations(mut self, durations: Vec<usize>) -> Result<Self, DynamicError> {
        self.check_pair_vector("duration", &durations)?;
        self.service = Some(durations);
        Ok(self)
    }

    /// Number of agents each task needs, all at once.
    pub fn with_demand(mut self, demand: Vec<usize>) -> Result<Self, DynamicError> {
        if demand.len() != self.n_tasks() || demand.contains(&0) {
            return Err(DynamicError::InvalidScenario(format!(
                "demand needs {} positive entries",
                self.n_tasks()
            )));
        }
        self.demand = Some(demand);
        Ok(self)
    }

    fn check_pair_vector(&self, what: &str, values: &[usize]) -> Result<(), DynamicError> {
        if values.len() != self.n_agents() * self.n_tasks() {
            return Err(DynamicError::InvalidScenario(format!(
                "{what} needs one entry per agent-task pair"
            )));
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_agents(&self) -> usize {
        self.agent_arrivals.len()
    }

    pub fn n_tasks(&self) -> usize {
        self.task_arrivals.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn agent_arrival(&self, agent: usize) -> Option<usize> {
        self.agent_arrivals[agent]
    }

    pub fn task_arrival(&self, task: usize) -> Option<usize> {
        self.task_arrivals[task]
    }

    pub fn agent_arrivals(&self) -> &[Option<usize>] {
        &self.agent_arrivals
    }

    pub fn task_arrivals(&self) -> &[Option<usize>] {
        &self.task_arrivals
    }

    /// `p_{ij tau}` (or `c_{ij tau}`), periods counted from 1.
    pub fn utility(&self, agent: usize, task: usize, period: usize) -> Rational {
        let (n, m) = (self.n_agents(), self.n_tasks());
        self.utilities[(period - 1) * n * m + agent * m + task]
    }

    pub fn is_renewable(&self) -> bool {
        self.service.is_some()
    }

    pub fn eta(&self, agent: usize, task: usize) -> usize {
        self.etas.as_ref().map_or(0, |e| e[agent * self.n_tasks() + task])
    }

    pub fn service_duration(&self, agent: usize, task: usize) -> Option<usize> {
        self.service.as_ref().map(|s| s[agent * self.n_tasks() + task])
    }

    pub fn demand(&self) -> Option<&[usize]> {
        self.demand.as_deref()
    }

    /// Agents task `task` needs; 1 unless a demand vector is set.
    pub fn task_demand(&self, task: usize) -> usize {
        self.demand.as_ref().map_or(1, |d| d[task])
    }

    /// Weight matrix of one period as a static instance.
    pub fn period_instance(&self, period: usize) -> Result<AssignmentInstance, DynamicError> {
        let (n, m) = (self.n_agents(), self.n_tasks());
        let start = (period - 1) * n * m;
        Ok(AssignmentInstance::from_flat(
            n,
            m,
            self.utilities[start..start + n * m].to_vec(),
            self.sense,
        )?)
    }

    /// Same scenario with different arrival periods.
    pub fn with_arrivals(&self, agents: Vec<Option<usize>>, tasks: Vec<Option<usize>>) -> Result<Self, DynamicError> {
        let mut rebuilt = Scenario::new(self.horizon, agents, tasks, self.utilities.clone(), self.sense)?;
        rebuilt.mode = self.mode;
        rebuilt.seed = self.seed;
        rebuilt.etas = self.etas.clone();
        rebuilt.service = self.service.clone();
        rebuilt.demand = self.demand.clone();
        Ok(rebuilt)
    }

    pub fn to_document(&self) -> ScenarioDocument {
        let (n, m) = (self.n_agents(), self.n_tasks());
        let pairs = |values: &Option<Vec<usize>>| {
            values.as_ref().map(|v| {
                (0..n)
                    .flat_map(|i| (0..m).map(move |j| (i, j)))
                    .filter(|&(i, j)| v[i * m + j] != 0)
                    .map(|(i, j)| PairValue {
                        agent: i,
                        task: j,
                        value: v[i * m + j],
                    })
                    .collect()
            })
        };
        let mut utilities = Vec::new();
        for period in 1..=self.horizon {
            for i in 0..n {
                for j in 0..m {
                    let value = self.utility(i, j, period);
                    if !value.is_zero() {
                        utilities.push(UtilityEntry {
                            agent: i,
                            task: j,
                            period,
                            value: RationalValue(value),
                        });
                    }
                }
            }
        }
        ScenarioDocument {
            horizon: self.horizon,
            sense: self.sense,
            mode: self.mode,
            seed: self.seed,
            agents: self
                .agent_arrivals
                .iter()
                .enumerate()
                .map(|(id, &arrival)| Arrival { id, arrival })
                .collect(),
            tasks: self
                .task_arrivals
                .iter()
                .enumerate()
                .map(|(id, &arrival)| Arrival { id, arrival })
                .collect(),
            utilities,
            etas: pairs(&self.etas),
            durations: pairs(&self.service),
            demand: self.demand.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arrival {
    pub id: usize,
    /// `None` for an entity that never shows up.
    pub arrival: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityEntry {
    pub agent: usize,
    pub task: usize,
    pub period: usize,
    pub value: RationalValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairValue {
    pub agent: usize,
    pub task: usize,
    pub value: usize,
}

/// On-disk scenario. Utility triples that are absent default to 0, as do
/// absent ETA and duration pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub horizon: usize,
    #[serde(default = "default_sense")]
    pub sense: Sense,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub agents: Vec<Arrival>,
    pub tasks: Vec<Arrival>,
    #[serde(default)]
    pub utilities: Vec<UtilityEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<PairValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub durations: Option<Vec<PairValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<Vec<usize>>,
}

fn default_sense() -> Sense {
    Sense::MaximizeProfit
}

fn ordered_arrivals(kind: &str, entries: Vec<Arrival>) -> Result<Vec<Option<usize>>, DynamicError> {
    let mut out = vec![None; entries.len()];
    let mut seen = vec![false; entries.len()];
    for entry in entries {
        if entry.id >= out.len() || seen[entry.id] {
            return Err(DynamicError::InvalidScenario(format!(
                "{kind} ids must be 0..{} without repeats (bad id {})",
                out.len(),
                entry.id
            )));
        }
        seen[entry.id] = true;
        out[entry.id] = entry.arrival;
    }
    Ok(out)
}

impl ScenarioDocument {
    pub fn into_scenario(self) -> Result<Scenario, DynamicError> {
        let agents = ordered_arrivals("agent", self.agents)?;
        let tasks = ordered_arrivals("task", self.tasks)?;
        let (n, m, h) = (agents.len(), tasks.len(), self.horizon);
        let cells = h.saturating_mul(n).saturating_mul(m);
        if cells > MAX_CELLS {
            return Err(DynamicError::InvalidScenario(format!(
                "{h} x {n} x {m} utilities exceed {MAX_CELLS}"
            )));
        }
        let mut utilities = vec![Rational::zero(); cells];
        for e in self.utilities {
            if e.agent >= n || e.task >= m || e.period == 0 || e.period > h {
                return Err(DynamicError::InvalidScenario(format!(
                    "utility entry ({}, {}, {}) out of range",
                    e.agent, e.task, e.period
                )));
            }
            utilities[(e.period - 1) * n * m + e.agent * m + e.task] = e.value.0;
        }
        let pairs = |what: &str, entries: Vec<PairValue>| -> Result<Vec<usize>, DynamicError> {
            let mut out = vec![0; n * m];
            for e in entries {
                if e.agent >= n || e.task >= m {
                    return Err(DynamicError::InvalidScenario(format!(
                        "{what} entry ({}, {}) out of range",
                        e.agent, e.task
                    )));
                }
                out[e.agent * m + e.task] = e.value;
            }
            Ok(out)
        };
        let mut scenario = Scenario::new(h, agents, tasks, utilities, self.sense)?
            .with_mode(self.mode)
            .with_seed(self.seed);
        if let Some(etas) = self.etas {
            scenario = scenario.with_etas(pairs("eta", etas)?)?;
        }
        if let Some(durations) = self.durations {
            scenario = scenario.with_service_durations(pairs("duration", durations)?)?;
        }
        if let Some(demand) = self.demand {
            scenario = scenario.with_demand(demand)?;
        }
        Ok(scenario)
    }
}

pub fn parse_scenario_json(text: &str) -> Result<Scenario, DynamicError> {
    let doc: ScenarioDocument =
        serde_json::from_str(text).map_err(|e| DynamicError::InvalidScenario(format!("line {}: {e}", e.line())))?;
    doc.into_scenario()
}

pub fn emit_scenario_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(&scenario.to_document()).expect("scenario document serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioParams {
    pub n_agents: usize,
    pub n_tasks: usize,
    pub horizon: usize,
    pub lo: i64,
    pub hi: i64,
    pub sense: Sense,
    pub mode: Mode,
    /// Largest ETA and service duration; `Some` makes the fleet renewable.
    pub service: Option<(usize, usize)>,
}

impl ScenarioParams {
    pub fn new(n_agents: usize, n_tasks: usize, horizon: usize) -> Self {
        Self {
            n_agents,
            n_tasks,
            horizon,
            lo: 0,
            hi: 10,
            sense: Sense::MaximizeProfit,
            mode: Mode::Commit,
            service: None,
        }
    }
}

/// Uniform arrival periods and uniform integer utilities in `[lo, hi]`.
pub fn random_scenario(params: &ScenarioParams, seed: u64) -> Result<Scenario, DynamicError> {
    if params.lo > params.hi {
        return Err(DynamicError::InvalidScenario(format!(
            "empty utility range [{}, {}]",
            params.lo, params.hi
        )));
    }
    let mut rng = rng_from_seed(seed);
    let h = params.horizon.max(1);
    let agents = (0..params.n_agents).map(|_| Some(rng.gen_range(1..=h))).collect();
    let tasks = (0..params.n_tasks).map(|_| Some(rng.gen_range(1..=h))).collect();
    let cells = params
        .horizon
        .saturating_mul(params.n_agents)
        .saturating_mul(params.n_tasks);
    if cells > MAX_CELLS {
        return Err(DynamicError::InvalidScenario(format!(
            "{cells} utilities exceed {MAX_CELLS}"
        )));
    }
    let utilities = (0..cells).map(|_| int(rng.gen_range(params.lo..=params.hi))).collect();
    let mut scenario = Scenario::new(params.horizon, agents, tasks, utilities, params.sense)?
        .with_mode(params.mode)
        .with_seed(seed);
    let pairs = params.n_agents * params.n_tasks;
    if params.mode == Mode::Reassign || params.service.is_some() {
        let max_eta = params.service.map_or(2, |(e, _)| e);
        scenario = scenario.with_etas((0..pairs).map(|_| rng.gen_range(0..=max_eta)).collect())?;
    }
    if let Some((_, max_duration)) = params.service {
        scenario = scenario.with_service_durations((0..pairs).map(|_| rng.gen_range(0..=max_duration)).collect())?;
    }
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Scenario::new(0, vec![], vec![], vec![], Sense::MaximizeProfit).is_err());
        assert!(Scenario::new(1, vec![Some(1)], vec![Some(1)], vec![], Sense::MaximizeProfit).is_err());
        assert!(Scenario::new(2, vec![Some(3)], vec![Some(1)], vec![int(0); 2], Sense::MaximizeProfit).is_err());
    }

    #[test]
    fn document_round_trip() {
        let params = ScenarioParams {
            service: Some((2, 3)),
            ..ScenarioParams::new(3, 4, 3)
        };
        let scenario = random_scenario(&params, 11).unwrap();
        let text = emit_scenario_json(&scenario);
        assert_eq!(parse_scenario_json(&text).unwrap(), scenario);
    }

    #[test]
    fn sparse_document() {
        let text = r#"{
            "horizon": 2,
            "agents": [{"id": 0, "arrival": 1}],
            "tasks": [{"id": 1, "arrival": 2}, {"id": 0, "arrival": 1}],
            "utilities": [{"agent": 0, "task": 0, "period": 1, "value": 3},
                          {"agent": 0, "task": 1, "period": 2, "value": "21/2"}]
        }"#;
        let s = parse_scenario_json(text).unwrap();
        assert_eq!(s.task_arrival(1), Some(2));
        assert_eq!(s.utility(0, 1, 2), Rational::new(21, 2));
        assert_eq!(s.utility(0, 1, 1), int(0));
        assert_eq!(s.sense(), Sense::MaximizeProfit);
        assert!(!s.is_renewable());
    }

    #[test]
    fn bad_documents() {
        let dup = r#"{"horizon": 1, "agents": [{"id": 0, "arrival": 1}, {"id": 0, "arrival": 1}], "tasks": []}"#;
        assert!(parse_scenario_json(dup).is_err());
        let range = r#"{"horizon": 1, "agents": [{"id": 0, "arrival": 1}], "tasks": [{"id": 0, "arrival": 1}],
            "utilities": [{"agent": 0, "task": 0, "period": 2, "value": 1}]}"#;
        assert!(parse_scenario_json(range).is_err());
        let unknown = r#"{"horizon": 1, "agents": [], "tasks": [], "extra": 1}"#;
        assert!(parse_scenario_json(unknown).is_err());
    }

    #[test]
    fn generator_is_seeded() {
        let p = ScenarioParams::new(4, 4, 3);
        assert_eq!(random_scenario(&p, 5).unwrap(), random_scenario(&p, 5).unwrap());
        assert_ne!(random_scenario(&p, 5).unwrap(), random_scenario(&p, 6).unwrap());
    }
}
