//! Distributed auction: every agent keeps its own copy of the price table,
//! learns prices only from its neighbors, and bids against that copy.
//!
//! Each table entry is a price with the id of the agent that set it. Merging
//! takes the higher price per task, the lower bidder id on equal prices. An
//! agent that no longer finds itself as the holder of its task is outbid
//! and bids again: on the cost form it picks `argmin_j (c_ij + p_j)` and
//! raises that price by the gap to its second best task plus epsilon.

use std::sync::Arc;

use fleetassign_core::{BipartiteGraph, IntCosts, SolveError};
use fleetassign_model::{objective_value, AssignmentInstance, Matching, ObjectiveKind, Rational};
use num_traits::Zero;

use crate::error::DistError;
use crate::sim::{contested_tasks, ProtocolNode, RoundLog, SimRun, Simulator};
use crate::topology::NetworkTopology;

/// Price and the agent that set it; `None` before any bid.
pub type PriceEntry = (i64, Option<usize>);

/// Whether `a` replaces `b` in a merge.
fn outranks(a: &PriceEntry, b: &PriceEntry) -> bool {
    let rank = |e: &PriceEntry| e.1.unwrap_or(usize::MAX);
    a.0 > b.0 || (a.0 == b.0 && rank(a) < rank(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionNode {
    id: usize,
    /// This agent's scaled costs; forbidden pairs carry a large penalty.
    costs: Vec<i64>,
    epsilon: i64,
    table: Vec<PriceEntry>,
    assigned: Option<usize>,
}

impl AuctionNode {
    pub fn new(id: usize, costs: Vec<i64>, epsilon: i64) -> Self {
        let n = costs.len();
        Self {
            id,
            costs,
            epsilon,
            table: vec![(0, None); n],
            assigned: None,
        }
    }

    pub fn table(&self) -> &[PriceEntry] {
        &self.table
    }

    fn bid(&mut self) {
        let mut best = (i64::MAX, 0);
        let mut second = i64::MAX;
        for (j, (&c, &(p, _))) in self.costs.iter().zip(&self.table).enumerate() {
            let value = c + p;
            if value < best.0 {
                second = best.0;
                best = (value, j);
            } else if value < second {
                second = value;
            }
        }
        let gamma = if self.costs.len() == 1 { 0 } else { second - best.0 };
        let task = best.1;
        self.table[task] = (self.table[task].0 + gamma + self.epsilon, Some(self.id));
        self.assigned = Some(task);
    }
}

impl ProtocolNode for AuctionNode {
    type Message = Arc<Vec<PriceEntry>>;

    fn message(&self) -> Self::Message {
        Arc::new(self.table.clone())
    }

    fn step(&mut self, inbox: &[(usize, Self::Message)]) -> bool {
        let mut changed = false;
        for (_, table) in inbox {
            for (mine, theirs) in self.table.iter_mut().zip(table.iter()) {
                if outranks(theirs, mine) {
                    *mine = *theirs;
                    changed = true;
                }
            }
        }
        if let Some(task) = self.assigned {
            if self.table[task].1 != Some(self.id) {
                self.assigned = None;
            }
        }
        if self.assigned.is_none() {
            self.bid();
            changed = true;
        }
        changed
    }

    fn selection(&self) -> Option<usize> {
        self.assigned
    }

    fn encode_state(&self) -> String {
        let entries: Vec<String> = self
            .table
            .iter()
            .map(|(p, b)| format!("{p}:{}", b.map_or("-".to_string(), |b| b.to_string())))
            .collect();
        format!("{}|{:?}|{}", self.id, self.assigned, entries.join(","))
    }
}

/// Scaled market shared by the lossless and lossy runs.
pub(crate) struct AuctionSetup {
    pub costs: IntCosts,
    pub nodes: Vec<AuctionNode>,
    big: i64,
    step: i64,
}

impl AuctionSetup {
    /// Prices stay within a few multiples of the penalty, each bid raises one
    /// of `n` prices by at least epsilon, and news needs up to diameter
    /// rounds to spread.
    fn guard(&self, diameter: usize) -> usize {
        let n = self.nodes.len() as u128;
        let hops = diameter as u128 + 1;
        (hops * n.pow(3) * ((4 * self.big as u128) / self.step as u128 + 2) + 100).min(usize::MAX as u128) as usize
    }
}

pub(crate) fn setup(instance: &AssignmentInstance, epsilon: Rational) -> Result<AuctionSetup, DistError> {
    if !instance.is_square() {
        return Err(SolveError::NotSquare {
            agents: instance.n_agents(),
            tasks: instance.n_tasks(),
        }
        .into());
    }
    if epsilon <= Rational::zero() {
        return Err(SolveError::InvalidEpsilon(epsilon).into());
    }
    let n = instance.n_agents();
    let costs = IntCosts::from_instance(&instance.to_min_cost().instance, &[epsilon])?;
    if !BipartiteGraph::from_predicate(n, n, |i, j| costs.is_allowed(i, j)).has_perfect_matching() {
        return Err(SolveError::Infeasible("no perfect matching over allowed pairs".into()).into());
    }
    let big = 2 * n as i64 * costs.max_abs() + 1;
    let step = costs.to_scaled(&epsilon)?;
    let nodes = (0..n)
        .map(|i| {
            let row = (0..n)
                .map(|j| if costs.is_allowed(i, j) { costs.get(i, j) } else { big })
                .collect();
            AuctionNode::new(i, row, step)
        })
        .collect();
    Ok(AuctionSetup {
        costs,
        nodes,
        big,
        step,
    })
}

pub(crate) fn check_nodes(instance: &AssignmentInstance, topology: &NetworkTopology) -> Result<(), DistError> {
    if topology.n_nodes() != instance.n_agents() {
        return Err(DistError::NodeCount {
            nodes: topology.n_nodes(),
            agents: instance.n_agents(),
        });
    }
    Ok(())
}

/// Initial agents of the distributed auction, each holding only its own row
/// of the scaled cost form.
pub fn auction_nodes(instance: &AssignmentInstance, epsilon: Rational) -> Result<Vec<AuctionNode>, DistError> {
    Ok(setup(instance, epsilon)?.nodes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributedAuctionRun {
    pub matching: Matching,
    pub value: Rational,
    pub rounds: usize,
    /// Element-wise maximum of the final local tables, in cost-form units.
    pub prices: Vec<Rational>,
    pub logs: Vec<RoundLog>,
}

pub fn run_distributed_auction(
    instance: &AssignmentInstance,
    topology: &NetworkTopology,
    epsilon: Rational,
) -> Result<DistributedAuctionRun, DistError> {
    if !topology.loss().is_zero() {
        return Err(DistError::Precondition(
            "a lossless topology; lossy networks go through run_lossy".into(),
        ));
    }
    check_nodes(instance, topology)?;
    let diameter = topology.diameter().ok_or(DistError::Disconnected)?;
    let setup = setup(instance, epsilon)?;
    let guard = setup.guard(diameter);
    let costs = setup.costs;
    let mut sim = Simulator::new(topology, setup.nodes);
    let SimRun {
        rounds,
        quiescent,
        logs,
    } = sim.run(diameter, guard);
    let nodes = sim.into_nodes();
    let selections: Vec<Option<usize>> = nodes.iter().map(ProtocolNode::selection).collect();
    let conflicts = contested_tasks(selections.iter().copied());
    let unassigned = selections.iter().filter(|s| s.is_none()).count();
    if !quiescent || conflicts > 0 || unassigned > 0 {
        return Err(DistError::NonConvergence {
            rounds,
            conflicts,
            unassigned,
        });
    }
    let task_of_agent: Vec<usize> = selections.into_iter().flatten().collect();
    let matching = Matching::from_permutation(&task_of_agent)?;
    let value = objective_value(instance, &matching, ObjectiveKind::Sum)?;
    let prices = (0..instance.n_tasks())
        .map(|j| costs.to_rational(nodes.iter().map(|node| node.table[j].0).max().unwrap_or(0)))
        .collect();
    Ok(DistributedAuctionRun {
        matching,
        value,
        rounds,
        prices,
        logs,
    })
}
