//! Seeded random graph families used by tests, benchmarks and the sweep harness.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId};

/// Erdős–Rényi `G(n, p)`; each unordered pair (ordered when `directed`) is an
/// edge with probability `p`.
pub fn gnp(n: usize, p: f64, directed: bool, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in 0..n as NodeId {
            let candidate = if directed { u != v } else { u < v };
            if candidate && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_dense_edges(n, edges, directed).expect("ids in range")
}

/// Scale-free graph with triadic closure (Holme–Kim): each new node attaches
/// `m` edges, the first by preferential attachment and each later one closing a
/// triangle with probability `triad_p`. Average degree is close to `2m`.
pub fn social(n: usize, m: usize, triad_p: f64, seed: u64) -> Graph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    // every edge endpoint, for degree-proportional sampling
    let mut endpoints: Vec<NodeId> = Vec::new();
    let mut edges = Vec::new();

    // seed clique on m + 1 nodes
    for u in 0..=m as NodeId {
        for v in u + 1..=m as NodeId {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
            endpoints.extend([u, v]);
            edges.push((u, v));
        }
    }

    for new in (m + 1) as NodeId..n as NodeId {
        let mut targets: HashSet<NodeId> = HashSet::with_capacity(m);
        let mut order: Vec<NodeId> = Vec::with_capacity(m);
        let mut last = None;
        while order.len() < m {
            let triad = last.and_then(|prev: NodeId| {
                if !rng.random_bool(triad_p) {
                    return None;
                }
                let options: Vec<NodeId> = adjacency[prev as usize]
                    .iter()
                    .copied()
                    .filter(|w| !targets.contains(w))
                    .collect();
                (!options.is_empty()).then(|| options[rng.random_range(0..options.len())])
            });
            let pick = match triad {
                Some(w) => w,
                None => endpoints[rng.random_range(0..endpoints.len())],
            };
            if targets.insert(pick) {
                order.push(pick);
                last = Some(pick);
            }
        }
        for t in order {
            adjacency[new as usize].push(t);
            adjacency[t as usize].push(new);
            endpoints.extend([new, t]);
            edges.push((new, t));
        }
    }
    Graph::from_dense_edges(n, edges, false).expect("ids in range")
}

/// Six-node graph over external ids 1..=6 where node 1 is adjacent to 2 and 5
/// only. With k = 2 and unquantized radii most seeds place 5 inside node 1's
/// yes-radius, 3, 4 and 6 beyond its no-radius, and 2 in between.
pub fn six_node_example() -> Graph {
    const EDGES: [(u64, u64); 8] = [(1, 2), (1, 5), (2, 3), (2, 4), (2, 5), (3, 5), (4, 6), (5, 6)];
    Graph::from_edges(EDGES, false).expect("non-empty")
}

/// Complete graph on `n` nodes.
pub fn complete(n: usize) -> Graph {
    let edges = (0..n as NodeId).flat_map(|u| (u + 1..n as NodeId).map(move |v| (u, v)));
    Graph::from_dense_edges(n, edges, false).expect("ids in range")
}
