//! Consensus-based auction. Each agent keeps `x` (its selected task), `y`
//! (the winning bid it believes each task has) and `z` (the agent it
//! believes holds that bid). A round merges the neighbors' `(y, z)` lists,
//! releases the selection if someone outbid it, and lets an unassigned agent
//! bid its raw score on the best task it can still win.
//!
//! Equal bids go to the lower agent id. Pairs that are forbidden,
//! unqualified or have a negative score are never bid on, and the greedy
//! reference skips them as well.

use std::sync::Arc;

use fleetassign_model::rational::format_rational;
use fleetassign_model::{objective_value, AssignmentInstance, Matching, ObjectiveKind, Rational, Sense};
use num_traits::Zero;

use crate::error::DistError;
use crate::sim::{contested_tasks, ProtocolNode, RoundLog, SimRun, Simulator};
use crate::topology::NetworkTopology;

fn usable(instance: &AssignmentInstance, i: usize, j: usize) -> bool {
    instance.is_allowed(i, j) && instance.is_qualified(i, j) && instance.weight(i, j) >= Rational::zero()
}

fn require_profit(instance: &AssignmentInstance) -> Result<(), DistError> {
    if instance.sense() != Sense::MaximizeProfit {
        return Err(DistError::Precondition(
            "a MaximizeProfit instance (scores are utilities)".into(),
        ));
    }
    Ok(())
}

/// Takes the largest remaining score, lowest agent then lowest task on ties,
/// until no usable pair is left.
pub fn greedy_sequential(instance: &AssignmentInstance) -> Result<Matching, DistError> {
    require_profit(instance)?;
    let (n, m) = (instance.n_agents(), instance.n_tasks());
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| usable(instance, i, j))
        .collect();
    // stable sort keeps (agent, task) order among equal scores
    pairs.sort_by_key(|&(i, j)| std::cmp::Reverse(instance.weight(i, j)));
    let mut agent_free = vec![true; n];
    let mut task_free = vec![true; m];
    let mut chosen = Vec::new();
    for (i, j) in pairs {
        if agent_free[i] && task_free[j] {
            agent_free[i] = false;
            task_free[j] = false;
            chosen.push((i, j));
        }
    }
    Ok(Matching::new(n, m, chosen)?)
}

/// Winning bid on one task: the score and the agent that placed it.
pub type Bid = (Rational, Option<usize>);

fn outranks(a: &Bid, b: &Bid) -> bool {
    match (a.1, b.1) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(x), Some(y)) => a.0 > b.0 || (a.0 == b.0 && x < y),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbaaNode {
    id: usize,
    /// This agent's scores, `None` where it may not bid.
    scores: Vec<Option<Rational>>,
    x: Option<usize>,
    bids: Vec<Bid>,
}

impl CbaaNode {
    pub fn new(id: usize, scores: Vec<Option<Rational>>) -> Self {
        let m = scores.len();
        Self {
            id,
            scores,
            x: None,
            bids: vec![(Rational::zero(), None); m],
        }
    }

    pub fn selection(&self) -> Option<usize> {
        self.x
    }

    /// Winning bids `y`.
    pub fn winning_bids(&self) -> impl Iterator<Item = Rational> + '_ {
        self.bids.iter().map(|b| b.0)
    }

    /// Winning agents `z`.
    pub fn winners(&self) -> impl Iterator<Item = Option<usize>> + '_ {
        self.bids.iter().map(|b| b.1)
    }

    fn bid(&mut self) -> bool {
        let mut best: Option<(usize, Rational)> = None;
        for (j, score) in self.scores.iter().enumerate() {
            let Some(score) = *score else { continue };
            if !outranks(&(score, Some(self.id)), &self.bids[j]) {
                continue;
            }
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        match best {
            Some((task, score)) => {
                self.x = Some(task);
                self.bids[task] = (score, Some(self.id));
                true
            }
            None => false,
        }
    }
}

impl ProtocolNode for CbaaNode {
    type Message = Arc<Vec<Bid>>;

    fn message(&self) -> Self::Message {
        Arc::new(self.bids.clone())
    }

    fn step(&mut self, inbox: &[(usize, Self::Message)]) -> bool {
        let mut changed = false;
        for (_, bids) in inbox {
            for (mine, theirs) in self.bids.iter_mut().zip(bids.iter()) {
                if outranks(theirs, mine) {
                    *mine = *theirs;
                    changed = true;
                }
            }
        }
        if let Some(task) = self.x {
            if self.bids[task].1 != Some(self.id) {
                self.x = None;
            }
        }
        if self.x.is_none() {
            changed |= self.bid();
        }
        changed
    }

    fn selection(&self) -> Option<usize> {
        self.x
    }

    fn encode_state(&self) -> String {
        let entries: Vec<String> = self
            .bids
            .iter()
            .map(|(y, z)| {
                format!(
                    "{}:{}",
                    format_rational(y),
                    z.map_or("-".to_string(), |z| z.to_string())
                )
            })
            .collect();
        format!("{}|{:?}|{}", self.id, self.x, entries.join(","))
    }
}

/// Initial agents, each holding only its own scores.
pub fn cbaa_nodes(instance: &AssignmentInstance) -> Vec<CbaaNode> {
    (0..instance.n_agents())
        .map(|i| {
            let scores = (0..instance.n_tasks())
                .map(|j| usable(instance, i, j).then(|| instance.weight(i, j)))
                .collect();
            CbaaNode::new(i, scores)
        })
        .collect()
}

/// Rounds after which a lossless run is declared stuck: every settled pair
/// needs at most `diameter + 1` rounds to spread.
pub(crate) fn guard(instance: &AssignmentInstance, diameter: usize) -> usize {
    2 * (instance.n_agents().min(instance.n_tasks()) + 2) * (diameter + 1)
}

pub(crate) fn check_topology(instance: &AssignmentInstance, topology: &NetworkTopology) -> Result<(), DistError> {
    require_profit(instance)?;
    if topology.n_nodes() != instance.n_agents() {
        return Err(DistError::NodeCount {
            nodes: topology.n_nodes(),
            agents: instance.n_agents(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbaaRun {
    pub matching: Matching,
    pub value: Rational,
    pub rounds: usize,
    pub logs: Vec<RoundLog>,
}

/// Synchronous CBAA over a static connected network. The asynchronous
/// variant is not modeled.
pub fn run_cbaa(instance: &AssignmentInstance, topology: &NetworkTopology, sync: bool) -> Result<CbaaRun, DistError> {
    if !sync {
        return Err(DistError::Unsupported("asynchronous CBAA deconfliction".into()));
    }
    check_topology(instance, topology)?;
    if !topology.loss().is_zero() {
        return Err(DistError::Precondition(
            "a lossless topology; lossy networks go through run_lossy".into(),
        ));
    }
    let diameter = topology.diameter().ok_or(DistError::Disconnected)?;
    let mut sim = Simulator::new(topology, cbaa_nodes(instance));
    let SimRun {
        rounds,
        quiescent,
        logs,
    } = sim.run(diameter, guard(instance, diameter));
    let selections: Vec<Option<usize>> = sim.nodes().iter().map(CbaaNode::selection).collect();
    let conflicts = contested_tasks(selections.iter().copied());
    if !quiescent || conflicts > 0 {
        return Err(DistError::NonConvergence {
            rounds,
            conflicts,
            unassigned: selections.iter().filter(|s| s.is_none()).count(),
        });
    }
    let matching = Matching::from_assignment(instance.n_tasks(), &selections)?;
    let value = objective_value(instance, &matching, ObjectiveKind::Sum)?;
    Ok(CbaaRun {
        matching,
        value,
        rounds,
        logs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::{int, ratio};

    fn profit(rows: &[&[i64]]) -> AssignmentInstance {
        AssignmentInstance::from_integers(rows, Sense::MaximizeProfit).unwrap()
    }

    #[test]
    fn greedy_two_by_two() {
        let m = greedy_sequential(&profit(&[&[10, 1], &[1, 9]])).unwrap();
        assert_eq!(m.pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn greedy_all_equal_takes_diagonal() {
        let m = greedy_sequential(&profit(&[&[4, 4, 4], &[4, 4, 4], &[4, 4, 4]])).unwrap();
        assert_eq!(m.pairs(), &[(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn greedy_can_be_half_of_optimum() {
        // greedy takes 10 and is left with 0; optimum 9 + 9
        let m = greedy_sequential(&profit(&[&[10, 9], &[9, 0]])).unwrap();
        assert_eq!(
            objective_value(&profit(&[&[10, 9], &[9, 0]]), &m, ObjectiveKind::Sum).unwrap(),
            int(10)
        );
    }

    #[test]
    fn greedy_skips_negative_and_needs_profit() {
        let m = greedy_sequential(&profit(&[&[-1, 2], &[-3, 5]])).unwrap();
        assert_eq!(m.pairs(), &[(1, 1)]);
        let cost = AssignmentInstance::from_integers(&[[1]], Sense::MinimizeCost).unwrap();
        assert!(matches!(greedy_sequential(&cost), Err(DistError::Precondition(_))));
    }

    #[test]
    fn cbaa_two_by_two_complete() {
        let inst = profit(&[&[10, 1], &[1, 9]]);
        let run = run_cbaa(&inst, &NetworkTopology::complete(2), true).unwrap();
        assert_eq!(run.value, int(19));
        assert_eq!(run.matching, greedy_sequential(&inst).unwrap());
    }

    #[test]
    fn single_agent_many_tasks() {
        let inst = profit(&[&[3, 8, 5, 8]]);
        let run = run_cbaa(&inst, &NetworkTopology::complete(1), true).unwrap();
        assert_eq!(run.matching.pairs(), &[(0, 1)]);
        assert_eq!(run.logs[0].unassigned, 0);
    }

    #[test]
    fn outbid_agent_releases() {
        // both start on task 0; agent 1 learns it lost and moves to task 1
        let inst = profit(&[&[9, 1], &[8, 7]]);
        let run = run_cbaa(&inst, &NetworkTopology::line(2), true).unwrap();
        assert_eq!(run.logs[0].conflicts_open, 1);
        assert_eq!(run.matching.pairs(), &[(0, 0), (1, 1)]);
    }

    #[test]
    fn preconditions() {
        let inst = profit(&[&[1, 2], &[3, 4]]);
        assert!(matches!(
            run_cbaa(&inst, &NetworkTopology::line(2), false),
            Err(DistError::Unsupported(_))
        ));
        let split = NetworkTopology::from_edges(2, &[]).unwrap();
        assert_eq!(run_cbaa(&inst, &split, true), Err(DistError::Disconnected));
        let lossy = NetworkTopology::line(2).with_loss(ratio(1, 3)).unwrap();
        assert!(matches!(run_cbaa(&inst, &lossy, true), Err(DistError::Precondition(_))));
    }
}
