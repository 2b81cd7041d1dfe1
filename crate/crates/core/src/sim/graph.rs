//! Undirected network generators for the adoption model.
//!
//! All generators draw from the caller's RNG in a fixed order so that a seed
//! fully determines the graph.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// Von Neumann lattice laid out row-major on ⌊√n⌋ rows.
    Grid,
    /// Watts-Strogatz ring: each node linked to `neighbors / 2` nodes on
    /// either side, then each lattice edge rewired with probability `rewire`.
    SmallWorld { neighbors: usize, rewire: f64 },
    /// Barabási-Albert preferential attachment with `attachment` edges per
    /// new node, grown from a complete core of `attachment + 1` nodes.
    ScaleFree { attachment: usize },
}

/// Sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut sets = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            if a != b {
                sets[a].insert(b);
                sets[b].insert(a);
            }
        }
        Self { adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Size of the connected component containing `start`.
    pub fn component_size(&self, start: usize) -> usize {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 0;
        while let Some(v) = queue.pop_front() {
            count += 1;
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.component_size(0) == self.len()
    }
}

pub fn generate<R: Rng>(topology: &Topology, n: usize, rng: &mut R) -> Result<Graph, SimError> {
    if n < 2 {
        return Err(SimError::InvalidConfig("need at least 2 nodes".into()));
    }
    let graph = match *topology {
        Topology::Grid => grid(n),
        Topology::SmallWorld { neighbors, rewire } => small_world(n, neighbors, rewire, rng)?,
        Topology::ScaleFree { attachment } => scale_free(n, attachment, rng)?,
    };
    if !graph.is_connected() {
        return Err(SimError::DisconnectedGraph);
    }
    Ok(graph)
}

fn grid(n: usize) -> Graph {
    let rows = ((n as f64).sqrt().floor() as usize).max(1);
    let cols = n.div_ceil(rows);
    let mut edges = Vec::new();
    for v in 0..n {
        if v % cols + 1 < cols && v + 1 < n {
            edges.push((v, v + 1));
        }
        if v + cols < n {
            edges.push((v, v + cols));
        }
    }
    Graph::from_edges(n, edges)
}

fn small_world<R: Rng>(n: usize, neighbors: usize, rewire: f64, rng: &mut R) -> Result<Graph, SimError> {
    if neighbors < 2 || neighbors % 2 != 0 || neighbors >= n {
        return Err(SimError::InvalidConfig(format!(
            "small-world neighbors must be even, at least 2 and below n (got {neighbors})"
        )));
    }
    if !(0.0..=1.0).contains(&rewire) {
        return Err(SimError::InvalidConfig(format!("rewire probability {rewire} outside [0, 1]")));
    }
    let mut adj = vec![BTreeSet::new(); n];
    for v in 0..n {
        for j in 1..=neighbors / 2 {
            let u = (v + j) % n;
            adj[v].insert(u);
            adj[u].insert(v);
        }
    }
    // One uniform draw per lattice edge (v, v+j), in v-major order; a
    // rewired edge then draws targets until one is neither v nor already
    // adjacent to v.
    for v in 0..n {
        for j in 1..=neighbors / 2 {
            let u = (v + j) % n;
            if rng.gen::<f64>() >= rewire || adj[v].len() >= n - 1 || !adj[v].contains(&u) {
                continue;
            }
            let target = loop {
                let t = rng.gen_range(0..n);
                if t != v && !adj[v].contains(&t) {
                    break t;
                }
            };
            adj[v].remove(&u);
            adj[u].remove(&v);
            adj[v].insert(target);
            adj[target].insert(v);
        }
    }
    Ok(Graph { adjacency: adj.into_iter().map(|s| s.into_iter().collect()).collect() })
}

fn scale_free<R: Rng>(n: usize, attachment: usize, rng: &mut R) -> Result<Graph, SimError> {
    if attachment < 1 || attachment >= n {
        return Err(SimError::InvalidConfig(format!("attachment count must be in 1..n (got {attachment})")));
    }
    let core = attachment + 1;
    let mut edges = Vec::new();
    // Each edge contributes both endpoints, so uniform picks from this list
    // are degree-proportional.
    let mut endpoints = Vec::new();
    for a in 0..core {
        for b in (a + 1)..core {
            edges.push((a, b));
            endpoints.extend([a, b]);
        }
    }
    for v in core..n {
        let mut targets = BTreeSet::new();
        while targets.len() < attachment {
            targets.insert(endpoints[rng.gen_range(0..endpoints.len())]);
        }
        for t in targets {
            edges.push((v, t));
            endpoints.extend([v, t]);
        }
    }
    Ok(Graph::from_edges(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_shapes() {
        let g = grid(16);
        assert_eq!(g.edge_count(), 24);
        assert!(g.is_connected());
        let g = grid(10);
        assert!(g.is_connected());
        assert_eq!(g.len(), 10);
        assert!((0..10).all(|v| g.degree(v) <= 4));
    }

    #[test]
    fn ring_without_rewiring() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = small_world(20, 4, 0.0, &mut rng).unwrap();
        assert!((0..20).all(|v| g.degree(v) == 4));
        assert_eq!(g.edge_count(), 40);
    }

    #[test]
    fn rewiring_keeps_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = small_world(200, 6, 0.2, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 600);
    }

    #[test]
    fn scale_free_edges_and_hubs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = scale_free(500, 2, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 3 + 2 * 497);
        assert!(g.is_connected());
        let max_deg = (0..500).map(|v| g.degree(v)).max().unwrap();
        assert!(max_deg > 20, "expected hubs, max degree {max_deg}");
    }

    #[test]
    fn bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(generate(&Topology::SmallWorld { neighbors: 3, rewire: 0.1 }, 20, &mut rng).is_err());
        assert!(generate(&Topology::SmallWorld { neighbors: 4, rewire: 1.5 }, 20, &mut rng).is_err());
        assert!(generate(&Topology::ScaleFree { attachment: 0 }, 20, &mut rng).is_err());
        assert!(generate(&Topology::Grid, 1, &mut rng).is_err());
    }

    #[test]
    fn fully_rewired_sparse_ring_can_disconnect() {
        let disconnected = (0..200u64).any(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            matches!(
                generate(&Topology::SmallWorld { neighbors: 2, rewire: 1.0 }, 30, &mut rng),
                Err(SimError::DisconnectedGraph)
            )
        });
        assert!(disconnected);
    }
}
