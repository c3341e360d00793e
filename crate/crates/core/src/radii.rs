//! Per-node definite-yes radius `r` and definite-no radius `R`.
//!
//! For node `v`, every other node at embedded distance `<= r(v)` is a neighbor
//! and every node at distance `>= R(v)` is not. Distances strictly between the
//! two are the fuzzy zone. `r = -1` means no distance triggers a definite yes;
//! `R = +inf` means no distance triggers a definite no.

use rayon::prelude::*;

use crate::fastmap::{EmbedError, Embedding};
use crate::graph::{Graph, NodeId};

/// Encoded value of an absent definite-yes radius.
pub const NO_YES_RADIUS: f64 = -1.0;
/// Encoded value of an absent definite-no radius.
pub const NO_NO_RADIUS: f64 = f64::INFINITY;

/// The `(r, R)` pair for one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius {
    pub yes: f64,
    pub no: f64,
}

impl Radius {
    pub fn has_yes(&self) -> bool {
        self.yes >= 0.0
    }

    pub fn has_no(&self) -> bool {
        self.no.is_finite()
    }
}

/// Radii for every node of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRadii {
    radii: Vec<Radius>,
    quantized: bool,
}

impl NodeRadii {
    pub fn new(radii: Vec<Radius>, quantized: bool) -> Self {
        NodeRadii { radii, quantized }
    }

    pub fn get(&self, v: NodeId) -> Radius {
        self.radii[v as usize]
    }

    pub fn as_slice(&self) -> &[Radius] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn is_quantized(&self) -> bool {
        self.quantized
    }
}

/// Euclidean distance between two embedded nodes.
pub fn euclidean_distance(e: &Embedding, u: NodeId, v: NodeId) -> Result<f64, EmbedError> {
    e.distance(u, v)
}

/// Computes `(r, R)` for node `v`.
///
/// With `m` the nearest non-neighbor distance and `M` the farthest neighbor
/// distance, `r` is the largest neighbor distance strictly below `m` and `R` the
/// smallest non-neighbor distance strictly above `M`. Quantized radii are the
/// widest integers that keep the same guarantees: `r = ceil(m) - 1` and
/// `R = floor(M) + 1`.
pub fn compute_radii(g: &Graph, e: &Embedding, v: NodeId, quantize: bool) -> Result<Radius, EmbedError> {
    let n = g.node_count();
    if n < 2 {
        return Err(EmbedError::TooFewNodes(n));
    }
    if v as usize >= n {
        return Err(EmbedError::OutOfRange { id: v, n });
    }
    Ok(radius_of(g, e, v, quantize))
}

fn radius_of(g: &Graph, e: &Embedding, v: NodeId, quantize: bool) -> Radius {
    let neighbors = g.neighbors(v);
    let mut nearest_non = f64::INFINITY;
    let mut farthest_nb = f64::NEG_INFINITY;
    let mut next = 0;
    for u in 0..g.node_count() as NodeId {
        if u == v {
            continue;
        }
        let d = e.distance_unchecked(v, u);
        // Neighbor lists are sorted, so a merge walk replaces membership lookups.
        while next < neighbors.len() && neighbors[next] < u {
            next += 1;
        }
        if next < neighbors.len() && neighbors[next] == u {
            farthest_nb = farthest_nb.max(d);
        } else {
            nearest_non = nearest_non.min(d);
        }
    }

    // Second pass: the bounds that sit just inside m and M.
    let mut yes = NO_YES_RADIUS;
    let mut no = NO_NO_RADIUS;
    let mut next = 0;
    for u in 0..g.node_count() as NodeId {
        if u == v {
            continue;
        }
        let d = e.distance_unchecked(v, u);
        while next < neighbors.len() && neighbors[next] < u {
            next += 1;
        }
        if next < neighbors.len() && neighbors[next] == u {
            if d < nearest_non && d > yes {
                yes = d;
            }
        } else if d > farthest_nb && d < no {
            no = d;
        }
    }

    if !quantize {
        return Radius { yes, no };
    }

    let yes = if yes < 0.0 {
        NO_YES_RADIUS
    } else if nearest_non.is_finite() {
        nearest_non.ceil() - 1.0
    } else {
        // Every other node is a neighbor.
        farthest_nb.ceil()
    };
    let no = if farthest_nb.is_finite() {
        farthest_nb.floor() + 1.0
    } else {
        no
    };
    Radius { yes, no }
}

/// Radii for all nodes, computed in parallel; equal to the sequential result.
pub fn compute_all_radii(g: &Graph, e: &Embedding, quantize: bool) -> Result<NodeRadii, EmbedError> {
    let n = g.node_count();
    if n < 2 {
        return Err(EmbedError::TooFewNodes(n));
    }
    let radii = (0..n as NodeId)
        .into_par_iter()
        .map(|v| radius_of(g, e, v, quantize))
        .collect();
    Ok(NodeRadii::new(radii, quantize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_embedding(xs: &[f64]) -> Embedding {
        Embedding::from_parts(xs.len(), 1, xs.to_vec(), 0).unwrap()
    }

    #[test]
    fn universal_neighbor() {
        // node 0 adjacent to all; neighbors at 1.5, 2.5, 3.2
        let g = Graph::from_dense_edges(4, [(0, 1), (0, 2), (0, 3)], false).unwrap();
        let e = line_embedding(&[0.0, 1.5, 2.5, 3.2]);
        let raw = compute_radii(&g, &e, 0, false).unwrap();
        assert_eq!(raw, Radius { yes: 3.2, no: f64::INFINITY });
        let q = compute_radii(&g, &e, 0, true).unwrap();
        assert_eq!(q, Radius { yes: 4.0, no: 4.0 });
    }

    #[test]
    fn isolated_node() {
        let g = Graph::from_dense_edges(4, [(1, 2)], false).unwrap();
        let e = line_embedding(&[0.0, 1.5, 2.5, 3.2]);
        let raw = compute_radii(&g, &e, 0, false).unwrap();
        assert_eq!(raw, Radius { yes: -1.0, no: 1.5 });
        let q = compute_radii(&g, &e, 0, true).unwrap();
        assert_eq!(q, Radius { yes: -1.0, no: 1.5 });
    }

    #[test]
    fn mixed_order_leaves_fuzzy_zone() {
        // from node 0: nb 1.0, non 2.0, nb 3.0, non 4.5
        let g = Graph::from_dense_edges(5, [(0, 1), (0, 3)], false).unwrap();
        let e = line_embedding(&[0.0, 1.0, 2.0, 3.0, 4.5]);
        let raw = compute_radii(&g, &e, 0, false).unwrap();
        assert_eq!(raw, Radius { yes: 1.0, no: 4.5 });
        let q = compute_radii(&g, &e, 0, true).unwrap();
        assert_eq!(q, Radius { yes: 1.0, no: 4.0 });
    }

    #[test]
    fn boundary_ties_favor_soundness() {
        // neighbor and non-neighbor both at 2.0
        let g = Graph::from_dense_edges(3, [(0, 1)], false).unwrap();
        let e = line_embedding(&[0.0, 2.0, -2.0]);
        let raw = compute_radii(&g, &e, 0, false).unwrap();
        assert_eq!(raw, Radius { yes: -1.0, no: f64::INFINITY });
    }

    #[test]
    fn coincident_non_neighbor_disables_yes() {
        let g = Graph::from_dense_edges(3, [(0, 1)], false).unwrap();
        let e = line_embedding(&[0.0, 0.0, 0.0]);
        for quantize in [false, true] {
            let r = compute_radii(&g, &e, 0, quantize).unwrap();
            assert_eq!(r.yes, -1.0);
            assert!(!r.has_yes());
        }
    }

    #[test]
    fn errors() {
        let g = Graph::from_dense_edges(2, [(0, 1)], false).unwrap();
        let e = line_embedding(&[0.0, 1.0]);
        assert!(compute_radii(&g, &e, 2, false).is_err());
        let single = Graph::from_dense_edges(1, [], false).unwrap();
        let e1 = line_embedding(&[0.0]);
        assert_eq!(
            compute_radii(&single, &e1, 0, false),
            Err(EmbedError::TooFewNodes(1))
        );
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = Graph::from_dense_edges(6, [(0, 1), (1, 2), (2, 3), (4, 5), (0, 5)], false).unwrap();
        let e = line_embedding(&[0.0, 0.7, 1.9, 2.2, 5.5, 0.4]);
        for quantize in [false, true] {
            let all = compute_all_radii(&g, &e, quantize).unwrap();
            for v in 0..6 {
                assert_eq!(all.get(v), compute_radii(&g, &e, v, quantize).unwrap());
            }
        }
    }
}
