//! FastMap embedding of graph nodes into k-dimensional Euclidean space.
//!
//! The base distance between two nodes is 0 for the same node, 1 for adjacent
//! nodes and `n` otherwise. It is evaluated lazily from the adjacency lists; the
//! n x n matrix is never built. Each axis picks a far-apart pivot pair, projects
//! every node onto the line through it, and later axes work on the residual
//! distance left after removing the axes already placed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Farthest-node hops performed by the pivot search.
pub const PIVOT_ITERATIONS: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node id {id} out of range for {n} nodes")]
    OutOfRange { id: NodeId, n: usize },
    #[error("degenerate axis")]
    DegenerateAxis,
}

/// Base graph distance: 0 on the diagonal, 1 between neighbors, `n` otherwise.
///
/// Directed graphs use the symmetric closure (an arc either way counts) since
/// the embedding needs a symmetric dissimilarity.
pub fn graph_distance(g: &Graph, u: NodeId, v: NodeId) -> Result<f64, EmbedError> {
    let n = g.node_count();
    for id in [u, v] {
        if id as usize >= n {
            return Err(EmbedError::OutOfRange { id, n });
        }
    }
    Ok(base_distance(g, u, v))
}

#[inline]
fn base_distance(g: &Graph, u: NodeId, v: NodeId) -> f64 {
    if u == v {
        0.0
    } else if g.has_edge(u, v) || (g.is_directed() && g.has_edge(v, u)) {
        1.0
    } else {
        g.node_count() as f64
    }
}

/// Coordinate of a node on the axis through pivots `a` and `b`:
/// `(d_ai^2 + d_ab^2 - d_bi^2) / (2 d_ab)`.
pub fn project(d_ai: f64, d_ab: f64, d_bi: f64) -> Result<f64, EmbedError> {
    if d_ab <= 0.0 {
        return Err(EmbedError::DegenerateAxis);
    }
    Ok((d_ai * d_ai + d_ab * d_ab - d_bi * d_bi) / (2.0 * d_ab))
}

/// Distance left after removing one axis; negative squares clamp to zero.
#[inline]
pub fn residual_distance(d_ij: f64, x_i: f64, x_j: f64) -> f64 {
    let delta = x_i - x_j;
    (d_ij * d_ij - delta * delta).max(0.0).sqrt()
}

/// Result of a pivot search on one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PivotChoice {
    Axis { a: NodeId, b: NodeId, distance: f64 },
    /// Every node is at residual distance zero from the search endpoint.
    Degenerate,
}

/// Pivot pair recorded for one embedding axis. `distance` is zero on a
/// degenerate axis, in which case the pair is meaningless and the axis is all zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pivot {
    pub a: NodeId,
    pub b: NodeId,
    pub distance: f64,
}

impl Pivot {
    pub fn is_degenerate(&self) -> bool {
        self.distance == 0.0
    }
}

/// Farthest-pair heuristic: start at `start` and hop to the farthest node
/// [`PIVOT_ITERATIONS`] times. Ties go to the lowest node id.
pub fn choose_pivots<D>(dist: D, n: usize, start: NodeId) -> Result<PivotChoice, EmbedError>
where
    D: Fn(NodeId, NodeId) -> f64 + Sync,
{
    if n < 2 {
        return Err(EmbedError::TooFewNodes(n));
    }
    let farthest = |from: NodeId| -> (NodeId, f64) {
        (0..n as NodeId)
            .into_par_iter()
            .filter(|&v| v != from)
            .map(|v| (v, dist(from, v)))
            .reduce(
                || (NodeId::MAX, f64::NEG_INFINITY),
                |x, y| {
                    if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                        y
                    } else {
                        x
                    }
                },
            )
    };

    let mut anchor = start;
    let (mut far, mut distance) = farthest(anchor);
    for _ in 1..PIVOT_ITERATIONS {
        anchor = far;
        (far, distance) = farthest(anchor);
    }
    if distance <= 0.0 {
        Ok(PivotChoice::Degenerate)
    } else {
        Ok(PivotChoice::Axis {
            a: anchor,
            b: far,
            distance,
        })
    }
}

/// An n x k coordinate table plus the pivots that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    n: usize,
    k: usize,
    coords: Vec<f64>,
    pivots: Vec<Pivot>,
    seed: u64,
}

impl Embedding {
    /// Wraps an existing row-major coordinate table, e.g. one read back from disk.
    pub fn from_parts(n: usize, k: usize, coords: Vec<f64>, seed: u64) -> Option<Self> {
        if k == 0 || coords.len() != n * k || coords.iter().any(|c| !c.is_finite()) {
            return None;
        }
        Some(Embedding {
            n,
            k,
            coords,
            pivots: Vec::new(),
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimensions(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Pivots per axis; empty for embeddings loaded from disk.
    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }

    pub fn point(&self, u: NodeId) -> &[f64] {
        let start = u as usize * self.k;
        &self.coords[start..start + self.k]
    }

    /// Row-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean distance between two embedded nodes.
    pub fn distance(&self, u: NodeId, v: NodeId) -> Result<f64, EmbedError> {
        for id in [u, v] {
            if id as usize >= self.n {
                return Err(EmbedError::OutOfRange { id, n: self.n });
            }
        }
        Ok(self.distance_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, u: NodeId, v: NodeId) -> f64 {
        self.point(u)
            .iter()
            .zip(self.point(v))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Residual distance on the axis currently being built, given the first `axes`
/// columns already filled in `coords`.
fn level_distance(g: &Graph, coords: &[f64], k: usize, axes: usize, u: NodeId, v: NodeId) -> f64 {
    let mut d = base_distance(g, u, v);
    let (pu, pv) = (u as usize * k, v as usize * k);
    for axis in 0..axes {
        d = residual_distance(d, coords[pu + axis], coords[pv + axis]);
    }
    d
}

/// Embeds `g` into `k` dimensions. Identical `(g, k, seed)` gives a bit-identical result.
pub fn fastmap_embed(g: &Graph, k: usize, seed: u64) -> Result<Embedding, EmbedError> {
    if k == 0 {
        return Err(EmbedError::ZeroDimension);
    }
    let n = g.node_count();
    if n < 2 {
        return Err(EmbedError::TooFewNodes(n));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![0.0; n * k];
    let mut pivots = Vec::with_capacity(k);
    let mut degenerate = false;

    for axis in 0..k {
        let start: NodeId = rng.random_range(0..n as NodeId);
        if degenerate {
            // Zero columns leave every residual unchanged, so all later axes are degenerate too.
            pivots.push(Pivot { a: start, b: start, distance: 0.0 });
            continue;
        }

        let frozen = &coords;
        let dist = |u, v| level_distance(g, frozen, k, axis, u, v);
        let (a, b, d_ab) = match choose_pivots(dist, n, start)? {
            PivotChoice::Axis { a, b, distance } => (a, b, distance),
            PivotChoice::Degenerate => {
                degenerate = true;
                pivots.push(Pivot { a: start, b: start, distance: 0.0 });
                continue;
            }
        };

        let column: Vec<f64> = (0..n as NodeId)
            .into_par_iter()
            .map(|i| {
                if i == a {
                    0.0
                } else if i == b {
                    d_ab
                } else {
                    let d_ai = dist(a, i);
                    let d_bi = dist(b, i);
                    (d_ai * d_ai + d_ab * d_ab - d_bi * d_bi) / (2.0 * d_ab)
                }
            })
            .collect();
        for (i, x) in column.into_iter().enumerate() {
            coords[i * k + axis] = x;
        }
        pivots.push(Pivot { a, b, distance: d_ab });
    }

    Ok(Embedding {
        n,
        k,
        coords,
        pivots,
        seed,
    })
}

/// Residual distance between two nodes just before `axis` was placed.
/// Exposed for invariant checks.
pub fn residual_before_axis(g: &Graph, e: &Embedding, axis: usize, u: NodeId, v: NodeId) -> f64 {
    level_distance(g, &e.coords, e.k, axis.min(e.k), u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_dense_edges(n, (0..n as NodeId - 1).map(|i| (i, i + 1)), false).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let edges = (0..n as NodeId).flat_map(|u| (u + 1..n as NodeId).map(move |v| (u, v)));
        Graph::from_dense_edges(n, edges, false).unwrap()
    }

    #[test]
    fn base_distances() {
        let g = path(6);
        assert_eq!(graph_distance(&g, 0, 1).unwrap(), 1.0);
        assert_eq!(graph_distance(&g, 0, 3).unwrap(), 6.0);
        assert_eq!(graph_distance(&g, 4, 4).unwrap(), 0.0);
        assert!(graph_distance(&g, 0, 6).is_err());
    }

    #[test]
    fn projection_formula() {
        assert_eq!(project(0.0, 6.0, 6.0).unwrap(), 0.0);
        assert_eq!(project(6.0, 6.0, 0.0).unwrap(), 6.0);
        assert_eq!(project(1.0, 6.0, 6.0).unwrap(), 1.0 / 12.0);
        assert_eq!(project(1.0, 0.0, 1.0), Err(EmbedError::DegenerateAxis));
    }

    #[test]
    fn residuals() {
        assert_eq!(residual_distance(5.0, 3.0, 0.0), 4.0);
        assert_eq!(residual_distance(1.0, 2.0, 0.0), 0.0);
        for x in [-3.5, 0.0, 2.25, 1e6] {
            assert_eq!(residual_distance(7.0, x, x), 7.0);
        }
    }

    #[test]
    fn two_nodes_force_the_pair() {
        let g = Graph::from_dense_edges(2, [(0, 1)], false).unwrap();
        for start in 0..2 {
            match choose_pivots(|u, v| base_distance(&g, u, v), 2, start).unwrap() {
                PivotChoice::Axis { a, b, .. } => {
                    assert_eq!([a.min(b), a.max(b)], [0, 1]);
                }
                PivotChoice::Degenerate => panic!("two distinct nodes are never degenerate"),
            }
        }
        assert_eq!(
            choose_pivots(|_, _| 1.0, 1, 0),
            Err(EmbedError::TooFewNodes(1))
        );
    }

    #[test]
    fn path_pivots_are_non_adjacent() {
        let g = path(5);
        // brute force farthest distance over all pairs
        let best = (0..5)
            .flat_map(|u| (0..5).map(move |v| (u, v)))
            .map(|(u, v)| base_distance(&g, u, v))
            .fold(0.0, f64::max);
        assert_eq!(best, 5.0);
        for start in 0..5 {
            let choice = choose_pivots(|u, v| base_distance(&g, u, v), 5, start).unwrap();
            let PivotChoice::Axis { a, b, distance } = choice else {
                panic!("degenerate")
            };
            assert_ne!(a, b);
            assert!(!g.has_edge(a, b));
            assert_eq!(distance, best);
            assert_eq!(
                choice,
                choose_pivots(|u, v| base_distance(&g, u, v), 5, start).unwrap()
            );
        }
    }

    #[test]
    fn zero_dimension_and_tiny_graph_rejected() {
        let g = path(3);
        assert_eq!(fastmap_embed(&g, 0, 1), Err(EmbedError::ZeroDimension));
        let single = Graph::from_dense_edges(1, [], false).unwrap();
        assert_eq!(fastmap_embed(&single, 2, 1), Err(EmbedError::TooFewNodes(1)));
    }

    #[test]
    fn one_dimension_anchors_pivots() {
        let g = path(7);
        let e = fastmap_embed(&g, 1, 3).unwrap();
        assert_eq!(e.coords().len(), 7);
        let p = e.pivots()[0];
        assert_eq!(e.point(p.a)[0], 0.0);
        assert_eq!(e.point(p.b)[0], p.distance);
    }

    #[test]
    fn complete_graph_embeds_within_unit_distance() {
        let g = complete(4);
        for k in 1..=4 {
            let e = fastmap_embed(&g, k, 11).unwrap();
            let p = e.pivots()[0];
            assert_eq!(e.point(p.a)[0], 0.0);
            assert_eq!(e.point(p.b)[0], 1.0);
            for u in 0..4 {
                for v in 0..4 {
                    for axis in 0..k {
                        let delta = (e.point(u)[axis] - e.point(v)[axis]).abs();
                        assert!(delta <= 1.0 + 1e-12, "axis {axis}: {delta}");
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_axes_are_zero_filled() {
        // Two nodes: the first axis absorbs the whole distance.
        let g = Graph::from_dense_edges(2, [(0, 1)], false).unwrap();
        let e = fastmap_embed(&g, 3, 0).unwrap();
        assert!(!e.pivots()[0].is_degenerate());
        assert!(e.pivots()[1].is_degenerate() && e.pivots()[2].is_degenerate());
        for u in 0..2 {
            assert_eq!(&e.point(u)[1..], &[0.0, 0.0]);
        }
        assert_eq!(e.distance(0, 1).unwrap(), 1.0);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let g = path(40);
        assert_eq!(fastmap_embed(&g, 5, 9).unwrap(), fastmap_embed(&g, 5, 9).unwrap());
    }

    #[test]
    fn euclidean_distance_basics() {
        let e = Embedding::from_parts(2, 2, vec![0.0, 0.0, 3.0, 4.0], 0).unwrap();
        assert_eq!(e.distance(0, 1).unwrap(), 5.0);
        assert_eq!(e.distance(1, 0).unwrap(), 5.0);
        assert_eq!(e.distance(1, 1).unwrap(), 0.0);
        assert!(e.distance(0, 2).is_err());
    }
}
