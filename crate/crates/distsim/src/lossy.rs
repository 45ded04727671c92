//! Protocols over unreliable links. Degradation is reported, not treated as
//! an error: a run stops after `diameter` quiet rounds or at `max_rounds`,
//! and contested tasks go to their lowest-id claimant when the outcome is
//! valued.

use std::fmt;

use fleetassign_core::solve_hungarian;
use fleetassign_model::{AssignmentInstance, Rational, RationalValue, Sense};
use num_traits::Zero;
use serde::Serialize;

use crate::auction::{auction_nodes, check_nodes};
use crate::cbaa::{cbaa_nodes, check_topology};
use crate::error::DistError;
use crate::sim::{contested_tasks, ProtocolNode, RoundLog, SimRun, Simulator};
use crate::topology::NetworkTopology;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    DistributedAuction { epsilon: Rational },
    Cbaa,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::DistributedAuction { .. } => write!(f, "dauction"),
            Protocol::Cbaa => write!(f, "cbaa"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LossyOutcome {
    pub protocol: String,
    pub loss: RationalValue,
    pub rounds: usize,
    /// Stopped on quiescence rather than on `max_rounds`.
    pub quiescent: bool,
    /// Quiescent, conflict-free and, for the auction, every agent assigned.
    pub converged: bool,
    pub conflicts_open: usize,
    pub unassigned: usize,
    /// Final `(agent, task)` claims, contested ones included.
    pub claims: Vec<(usize, usize)>,
    /// Value of the claims after contested tasks go to their lowest-id claimant.
    pub value: RationalValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<RationalValue>,
    /// `value / optimum` under profit, `optimum / value` for a complete cost
    /// assignment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_ratio: Option<RationalValue>,
    #[serde(skip)]
    pub logs: Vec<RoundLog>,
}

pub fn run_lossy(
    protocol: Protocol,
    instance: &AssignmentInstance,
    topology: &NetworkTopology,
    max_rounds: usize,
) -> Result<LossyOutcome, DistError> {
    let quiet = topology.diameter().unwrap_or(topology.n_nodes());
    let (selections, run) = match protocol {
        Protocol::DistributedAuction { epsilon } => {
            check_nodes(instance, topology)?;
            simulate(topology, auction_nodes(instance, epsilon)?, quiet, max_rounds)
        }
        Protocol::Cbaa => {
            check_topology(instance, topology)?;
            simulate(topology, cbaa_nodes(instance), quiet, max_rounds)
        }
    };
    let conflicts_open = contested_tasks(selections.iter().copied());
    let unassigned = selections.iter().filter(|s| s.is_none()).count();
    let claims: Vec<(usize, usize)> = selections
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|j| (i, j)))
        .collect();

    let mut holder = vec![None; instance.n_tasks()];
    for &(i, j) in &claims {
        holder[j].get_or_insert(i);
    }
    let kept: Vec<(usize, usize)> = holder
        .iter()
        .enumerate()
        .filter_map(|(j, h)| h.map(|i| (i, j)))
        .collect();
    let value = kept
        .iter()
        .fold(Rational::zero(), |acc, &(i, j)| acc + instance.weight(i, j));
    let optimum = solve_hungarian(instance).ok().map(|s| s.value);
    let complete = kept.len() == instance.n_agents().min(instance.n_tasks());
    let value_ratio = optimum.and_then(|opt| match instance.sense() {
        Sense::MaximizeProfit if opt > Rational::zero() => Some(value / opt),
        Sense::MinimizeCost if complete && value > Rational::zero() => Some(opt / value),
        _ => None,
    });
    let converged = run.quiescent && conflicts_open == 0 && (matches!(protocol, Protocol::Cbaa) || unassigned == 0);
    Ok(LossyOutcome {
        protocol: protocol.to_string(),
        loss: RationalValue(topology.loss()),
        rounds: run.rounds,
        quiescent: run.quiescent,
        converged,
        conflicts_open,
        unassigned,
        claims,
        value: RationalValue(value),
        optimum: optimum.map(RationalValue),
        value_ratio: value_ratio.map(RationalValue),
        logs: run.logs,
    })
}

fn simulate<N: ProtocolNode>(
    topology: &NetworkTopology,
    nodes: Vec<N>,
    quiet: usize,
    max_rounds: usize,
) -> (Vec<Option<usize>>, SimRun) {
    let mut sim = Simulator::new(topology, nodes);
    let run = sim.run(quiet, max_rounds);
    (sim.nodes().iter().map(ProtocolNode::selection).collect(), run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{run_cbaa, run_distributed_auction};
    use fleetassign_model::generate::{random_instance, InstanceParams};
    use fleetassign_model::{int, ratio};

    fn profit(n: usize, seed: u64) -> AssignmentInstance {
        let params = InstanceParams {
            sense: Sense::MaximizeProfit,
            ..InstanceParams::square(n, 0, 20)
        };
        random_instance(&params, seed).unwrap()
    }

    #[test]
    fn zero_loss_reduces_to_lossless() {
        for seed in 0..10 {
            let inst = profit(5, seed);
            let ring = NetworkTopology::ring(5);
            let lossy = run_lossy(Protocol::Cbaa, &inst, &ring, 500).unwrap();
            let exact = run_cbaa(&inst, &ring, true).unwrap();
            assert!(lossy.converged);
            assert_eq!(lossy.claims, exact.matching.pairs());
            assert_eq!(lossy.rounds, exact.rounds);
            assert_eq!(lossy.logs, exact.logs);

            let eps = ratio(1, 6);
            let lossy = run_lossy(Protocol::DistributedAuction { epsilon: eps }, &inst, &ring, 100_000).unwrap();
            let exact = run_distributed_auction(&inst, &ring, eps).unwrap();
            assert!(lossy.converged);
            assert_eq!(lossy.claims, exact.matching.pairs());
            assert_eq!(lossy.value.0, exact.value);
            assert_eq!(lossy.value_ratio, Some(RationalValue(int(1))));
        }
    }

    #[test]
    fn total_loss_leaves_first_choices() {
        // every agent prefers task 0 and never hears about the others
        let inst =
            AssignmentInstance::from_integers(&[[9, 1, 1], [8, 2, 1], [7, 1, 3]], Sense::MaximizeProfit).unwrap();
        let dead = NetworkTopology::complete(3).with_loss(int(1)).unwrap();
        for protocol in [Protocol::Cbaa, Protocol::DistributedAuction { epsilon: ratio(1, 4) }] {
            let out = run_lossy(protocol, &inst, &dead, 30).unwrap();
            assert_eq!(out.conflicts_open, 1, "{protocol}");
            assert_eq!(out.claims, vec![(0, 0), (1, 0), (2, 0)]);
            assert!(!out.converged);
            assert_eq!(out.value.0, int(9));
            assert_eq!(out.logs.last().unwrap().conflicts_open, 1);
        }
    }

    #[test]
    fn seeded_loss_is_reproducible() {
        let inst = profit(6, 3);
        let topo = NetworkTopology::ring(6).with_loss(ratio(3, 10)).unwrap().with_seed(11);
        let a = run_lossy(Protocol::Cbaa, &inst, &topo, 200).unwrap();
        let b = run_lossy(Protocol::Cbaa, &inst, &topo, 200).unwrap();
        assert_eq!(a, b);
        assert!(a.logs.iter().all(|l| l.messages_dropped <= l.messages_sent));
    }
}
