//! Undirected communication graphs between agents, with a seeded loss model.

use std::collections::VecDeque;

use fleetassign_model::generate::rng_from_seed;
use fleetassign_model::{Rational, RationalValue};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::DistError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    n: usize,
    adjacency: Vec<Vec<bool>>,
    neighbors: Vec<Vec<usize>>,
    diameter: Option<usize>,
    loss: Rational,
    seed: u64,
}

impl NetworkTopology {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, DistError> {
        let mut adjacency = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(DistError::InvalidTopology(format!("edge ({a}, {b}) outside {n} nodes")));
            }
            if a == b {
                return Err(DistError::InvalidTopology(format!("self loop at {a}")));
            }
            adjacency[a][b] = true;
            adjacency[b][a] = true;
        }
        let neighbors: Vec<Vec<usize>> = adjacency
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, &e)| e).map(|(j, _)| j).collect())
            .collect();
        let diameter = diameter_of(&neighbors);
        Ok(Self {
            n,
            adjacency,
            neighbors,
            diameter,
            loss: Rational::zero(),
            seed: 0,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::from_edges(n, &edges).expect("valid edges")
    }

    pub fn line(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|b| (b - 1, b)).collect();
        Self::from_edges(n, &edges).expect("valid edges")
    }

    pub fn ring(n: usize) -> Self {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|b| (b - 1, b)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Self::from_edges(n, &edges).expect("valid edges")
    }

    /// `G(n, p)` sample; components are then chained through their lowest
    /// nodes so the result is always connected.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DistError::InvalidTopology(format!(
                "edge probability {p} outside [0, 1]"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        let sampled = Self::from_edges(n, &edges)?;
        let roots = sampled.component_roots();
        edges.extend(roots.windows(2).map(|w| (w[0], w[1])));
        Ok(Self::from_edges(n, &edges)?.with_seed(seed))
    }

    pub fn with_loss(mut self, loss: Rational) -> Result<Self, DistError> {
        if loss < Rational::zero() || loss > Rational::one() {
            return Err(DistError::InvalidTopology(format!(
                "loss probability {loss} outside [0, 1]"
            )));
        }
        self.loss = loss;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| self.neighbors[a].iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.diameter.is_some()
    }

    /// Longest shortest path; `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        self.diameter
    }

    pub fn loss(&self) -> Rational {
        self.loss
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn component_roots(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut roots = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            roots.push(start);
            for (node, _) in bfs(&self.neighbors, start) {
                seen[node] = true;
            }
        }
        roots
    }
}

/// Nodes reachable from `start` with their hop distance.
fn bfs(neighbors: &[Vec<usize>], start: usize) -> Vec<(usize, usize)> {
    let mut dist = vec![usize::MAX; neighbors.len()];
    let mut queue = VecDeque::from([start]);
    dist[start] = 0;
    let mut out = Vec::new();
    while let Some(a) = queue.pop_front() {
        out.push((a, dist[a]));
        for &b in &neighbors[a] {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
        }
    }
    out
}

fn diameter_of(neighbors: &[Vec<usize>]) -> Option<usize> {
    let n = neighbors.len();
    let mut diameter = 0;
    for start in 0..n {
        let reached = bfs(neighbors, start);
        if reached.len() < n {
            return None;
        }
        diameter = diameter.max(reached.iter().map(|&(_, d)| d).max().unwrap_or(0));
    }
    Some(diameter)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDocument {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default = "zero_loss")]
    loss: RationalValue,
    #[serde(default)]
    seed: u64,
}

fn zero_loss() -> RationalValue {
    RationalValue(Rational::zero())
}

pub fn parse_topology_json(text: &str) -> Result<NetworkTopology, DistError> {
    let doc: TopologyDocument = serde_json::from_str(text).map_err(|e| DistError::Format(e.to_string()))?;
    let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
    Ok(NetworkTopology::from_edges(doc.n, &edges)?
        .with_loss(doc.loss.0)?
        .with_seed(doc.seed))
}

pub fn emit_topology_json(topology: &NetworkTopology) -> String {
    let doc = TopologyDocument {
        n: topology.n,
        edges: topology.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        loss: RationalValue(topology.loss),
        seed: topology.seed,
    };
    serde_json::to_string_pretty(&doc).expect("topology serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::ratio;

    #[test]
    fn diameters() {
        assert_eq!(NetworkTopology::complete(3).diameter(), Some(1));
        assert_eq!(NetworkTopology::complete(1).diameter(), Some(0));
        assert_eq!(NetworkTopology::line(4).diameter(), Some(3));
        assert_eq!(NetworkTopology::ring(6).diameter(), Some(3));
        assert_eq!(NetworkTopology::ring(2).edges(), vec![(0, 1)]);
        let split = NetworkTopology::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!split.is_connected());
        assert_eq!(split.diameter(), None);
    }

    #[test]
    fn diameter_at_most_n_minus_one() {
        for seed in 0..30 {
            let t = NetworkTopology::erdos_renyi(7, 0.2, seed).unwrap();
            assert!(t.is_connected());
            assert!(t.diameter().unwrap() <= 6);
        }
        let sparse = NetworkTopology::erdos_renyi(5, 0.0, 1).unwrap();
        assert_eq!(sparse.diameter(), Some(4));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(NetworkTopology::from_edges(2, &[(0, 2)]).is_err());
        assert!(NetworkTopology::from_edges(2, &[(1, 1)]).is_err());
        assert!(NetworkTopology::line(3).with_loss(ratio(3, 2)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = NetworkTopology::ring(5).with_loss(ratio(1, 10)).unwrap().with_seed(9);
        let back = parse_topology_json(&emit_topology_json(&t)).unwrap();
        assert_eq!(back, t);
        let parsed = parse_topology_json(r#"{"n": 3, "edges": [[0, 1], [1, 2]], "loss": "1/4", "seed": 2}"#).unwrap();
        assert_eq!(parsed.loss(), ratio(1, 4));
        assert!(parse_topology_json(r#"{"n": 2, "edges": [], "extra": 1}"#).is_err());
    }
}
