//! Hopcroft-Karp maximum cardinality matching.

use std::collections::VecDeque;

use fleetassign_model::Matching;

const UNMATCHED: usize = usize::MAX;

/// Bipartite graph stored as sorted adjacency lists from the left side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); n_left];
        for &(l, r) in edges {
            assert!(l < n_left && r < n_right, "edge ({l}, {r}) outside {n_left}x{n_right}");
            adjacency[l].push(r);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self {
            n_left,
            n_right,
            adjacency,
        }
    }

    pub fn from_predicate(n_left: usize, n_right: usize, mut keep: impl FnMut(usize, usize) -> bool) -> Self {
        let adjacency = (0..n_left)
            .map(|l| (0..n_right).filter(|&r| keep(l, r)).collect())
            .collect();
        Self {
            n_left,
            n_right,
            adjacency,
        }
    }

    /// Size of a maximum matching and the partner of every left vertex.
    pub fn maximum_matching(&self) -> (usize, Vec<Option<usize>>) {
        let mut hk = HopcroftKarp::new(self);
        let size = hk.run();
        let partners = hk.match_left.iter().map(|&r| (r != UNMATCHED).then_some(r)).collect();
        (size, partners)
    }

    pub fn has_perfect_matching(&self) -> bool {
        self.n_left == self.n_right && self.maximum_matching().0 == self.n_left
    }
}

struct HopcroftKarp<'g> {
    graph: &'g BipartiteGraph,
    match_left: Vec<usize>,
    match_right: Vec<usize>,
    layer: Vec<u32>,
}

impl<'g> HopcroftKarp<'g> {
    fn new(graph: &'g BipartiteGraph) -> Self {
        Self {
            graph,
            match_left: vec![UNMATCHED; graph.n_left],
            match_right: vec![UNMATCHED; graph.n_right],
            layer: vec![u32::MAX; graph.n_left],
        }
    }

    fn run(&mut self) -> usize {
        let mut size = 0;
        while self.build_layers() {
            for l in 0..self.graph.n_left {
                if self.match_left[l] == UNMATCHED && self.augment(l) {
                    size += 1;
                }
            }
        }
        size
    }

    /// BFS from free left vertices; true if some free right vertex is reachable.
    fn build_layers(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for l in 0..self.graph.n_left {
            if self.match_left[l] == UNMATCHED {
                self.layer[l] = 0;
                queue.push_back(l);
            } else {
                self.layer[l] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &self.graph.adjacency[l] {
                let next = self.match_right[r];
                if next == UNMATCHED {
                    found = true;
                } else if self.layer[next] == u32::MAX {
                    self.layer[next] = self.layer[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        found
    }

    /// Layered DFS, iterative to stay safe on long paths.
    fn augment(&mut self, start: usize) -> bool {
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (l, ref mut cursor)) = stack.last_mut() {
            let adjacency = &self.graph.adjacency[l];
            if *cursor >= adjacency.len() {
                self.layer[l] = u32::MAX;
                stack.pop();
                continue;
            }
            let r = adjacency[*cursor];
            *cursor += 1;
            let next = self.match_right[r];
            if next == UNMATCHED {
                // flip the path recorded on the stack
                let mut right = r;
                for &(left, _) in stack.iter().rev() {
                    let previous = self.match_left[left];
                    self.match_left[left] = right;
                    self.match_right[right] = left;
                    right = previous;
                }
                return true;
            }
            if self.layer[next] == self.layer[l] + 1 {
                stack.push((next, 0));
            }
        }
        false
    }
}

/// Maximum matching of the bipartite graph `A x T` with the given edges.
pub fn max_cardinality_matching(n_agents: usize, n_tasks: usize, edges: &[(usize, usize)]) -> Matching {
    let graph = BipartiteGraph::new(n_agents, n_tasks, edges);
    let (_, partners) = graph.maximum_matching();
    Matching::from_assignment(n_tasks, &partners).expect("matching is conflict-free")
}
