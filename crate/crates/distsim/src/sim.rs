//! Synchronous round scheduler. In round `r` every node broadcasts its state
//! from the end of round `r - 1` to its neighbors; each delivered message is
//! dropped independently with the topology's loss probability; then every
//! node steps on its inbox. Nodes never see anything but their own state and
//! their inbox.

use std::collections::HashMap;

use fleetassign_model::generate::rng_from_seed;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::topology::NetworkTopology;

pub trait ProtocolNode {
    type Message: Clone;

    fn message(&self) -> Self::Message;

    /// Consumes one round's inbox of `(sender, message)`; returns whether the
    /// node's state changed.
    fn step(&mut self, inbox: &[(usize, Self::Message)]) -> bool;

    /// Task the node currently claims.
    fn selection(&self) -> Option<usize>;

    /// Canonical text form of the node's state, hashed into the round logs.
    fn encode_state(&self) -> String;

    fn digest(&self) -> String {
        let hash = Sha256::digest(self.encode_state().as_bytes());
        hex::encode(&hash[..8])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub messages_sent: usize,
    pub messages_dropped: usize,
    /// Tasks claimed by more than one node after the round.
    pub conflicts_open: usize,
    pub unassigned: usize,
    /// Short SHA-256 of each node's state after the round.
    pub digests: Vec<String>,
}

pub fn logs_to_jsonl(logs: &[RoundLog]) -> String {
    logs.iter()
        .map(|log| serde_json::to_string(log).expect("log serializes") + "\n")
        .collect()
}

/// Tasks claimed by two or more of `selections`.
pub fn contested_tasks(selections: impl IntoIterator<Item = Option<usize>>) -> usize {
    let mut claims: HashMap<usize, usize> = HashMap::new();
    for task in selections.into_iter().flatten() {
        *claims.entry(task).or_default() += 1;
    }
    claims.values().filter(|&&c| c > 1).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRun {
    pub rounds: usize,
    /// Whether the required number of quiescent rounds was reached.
    pub quiescent: bool,
    pub logs: Vec<RoundLog>,
}

pub type Inbox<M> = Vec<(usize, M)>;

pub struct Simulator<'t, N: ProtocolNode> {
    topology: &'t NetworkTopology,
    nodes: Vec<N>,
    rng: ChaCha8Rng,
    round: usize,
    recorded: Option<Vec<Vec<Inbox<N::Message>>>>,
}

impl<'t, N: ProtocolNode> Simulator<'t, N> {
    pub fn new(topology: &'t NetworkTopology, nodes: Vec<N>) -> Self {
        assert_eq!(topology.n_nodes(), nodes.len(), "one node per topology vertex");
        Self {
            topology,
            nodes,
            rng: rng_from_seed(topology.seed()),
            round: 0,
            recorded: None,
        }
    }

    /// Keeps every delivered inbox, indexed `[round - 1][node]`.
    pub fn recording(mut self) -> Self {
        self.recorded = Some(Vec::new());
        self
    }

    pub fn nodes(&self) -> &[N] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<N> {
        self.nodes
    }

    pub fn inboxes(&self) -> Option<&[Vec<Inbox<N::Message>>]> {
        self.recorded.as_deref()
    }

    fn dropped(&mut self) -> bool {
        let loss = self.topology.loss();
        if loss.is_zero() {
            false
        } else if loss.is_one() {
            true
        } else {
            self.rng.gen_range(0..*loss.denom()) < *loss.numer()
        }
    }

    /// Runs one round; returns its log and whether any node changed.
    pub fn round(&mut self) -> (RoundLog, bool) {
        self.round += 1;
        let outgoing: Vec<N::Message> = self.nodes.iter().map(ProtocolNode::message).collect();
        let mut inboxes: Vec<Inbox<N::Message>> = vec![Vec::new(); self.nodes.len()];
        let (mut sent, mut dropped) = (0, 0);
        for (sender, message) in outgoing.iter().enumerate() {
            for &receiver in self.topology.neighbors(sender) {
                sent += 1;
                if self.dropped() {
                    dropped += 1;
                } else {
                    inboxes[receiver].push((sender, message.clone()));
                }
            }
        }
        let mut changed = false;
        for (node, inbox) in self.nodes.iter_mut().zip(&inboxes) {
            changed |= node.step(inbox);
        }
        if let Some(recorded) = self.recorded.as_mut() {
            recorded.push(inboxes);
        }
        let log = RoundLog {
            round: self.round,
            messages_sent: sent,
            messages_dropped: dropped,
            conflicts_open: contested_tasks(self.nodes.iter().map(ProtocolNode::selection)),
            unassigned: self.nodes.iter().filter(|n| n.selection().is_none()).count(),
            digests: self.nodes.iter().map(ProtocolNode::digest).collect(),
        };
        (log, changed)
    }

    /// Rounds until `quiescence` consecutive rounds change nothing, or until
    /// `max_rounds` have run.
    pub fn run(&mut self, quiescence: usize, max_rounds: usize) -> SimRun {
        let quiescence = quiescence.max(1);
        let mut logs = Vec::new();
        let mut calm = 0;
        while logs.len() < max_rounds && calm < quiescence {
            let (log, changed) = self.round();
            logs.push(log);
            calm = if changed { 0 } else { calm + 1 };
        }
        SimRun {
            rounds: logs.len(),
            quiescent: calm >= quiescence,
            logs,
        }
    }
}
