//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use fuzzmap::{Embedding, Graph, NodeId};

/// Euclidean norm written as an explicit index loop over the raw coordinate table.
pub fn norm_distance(e: &Embedding, u: NodeId, v: NodeId) -> f64 {
    let k = e.dimensions();
    let coords = e.coords();
    let mut acc = 0.0;
    for axis in 0..k {
        let diff = coords[u as usize * k + axis] - coords[v as usize * k + axis];
        acc += diff * diff;
    }
    acc.sqrt()
}

/// `(r, R)` by sorting every other node by distance and scanning from both ends.
pub fn radii_by_sorting(g: &Graph, e: &Embedding, v: NodeId, quantize: bool) -> (f64, f64) {
    let mut list: Vec<(f64, bool)> = (0..g.node_count() as NodeId)
        .filter(|&u| u != v)
        .map(|u| (norm_distance(e, v, u), g.neighbors(v).contains(&u)))
        .collect();
    list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // forward: stop at the first distance group holding a non-neighbor
    let mut r = -1.0;
    let mut i = 0;
    while i < list.len() {
        let d = list[i].0;
        let group_end = list[i..].iter().position(|x| x.0 != d).map_or(list.len(), |p| i + p);
        if list[i..group_end].iter().any(|x| !x.1) {
            break;
        }
        r = d;
        i = group_end;
    }

    // backward: stop at the first distance group holding a neighbor
    let mut big_r = f64::INFINITY;
    let mut j = list.len();
    while j > 0 {
        let d = list[j - 1].0;
        let group_start = list[..j].iter().rposition(|x| x.0 != d).map_or(0, |p| p + 1);
        if list[group_start..j].iter().any(|x| x.1) {
            break;
        }
        big_r = d;
        j = group_start;
    }

    if !quantize {
        return (r, big_r);
    }
    let nearest_non = list.iter().find(|x| !x.1).map(|x| x.0);
    let farthest_nb = list.iter().rev().find(|x| x.1).map(|x| x.0);
    let rq = match (r < 0.0, nearest_non, farthest_nb) {
        (true, _, _) => -1.0,
        (false, Some(m), _) => m.ceil() - 1.0,
        (false, None, Some(big_m)) => big_m.ceil(),
        (false, None, None) => unreachable!("n >= 2"),
    };
    let big_rq = match farthest_nb {
        Some(big_m) => big_m.floor() + 1.0,
        None => big_r,
    };
    (rq, big_rq)
}

/// Centroid of the default two-rule system's output for crisp input `x`,
/// integrated with `samples` midpoint cells on `[0, 1]`.
pub fn default_centroid(x: f64, samples: usize) -> f64 {
    let mut area = 0.0;
    let mut moment = 0.0;
    let h = 1.0 / samples as f64;
    for i in 0..samples {
        let y = (i as f64 + 0.5) * h;
        let mu = f64::max(x.min(y), (1.0 - x).min(1.0 - y));
        area += mu;
        moment += mu * y;
    }
    moment / area
}

/// Random graph corpus: `count` graphs cycling through the given densities with
/// sizes spread over `[10, 200]`.
pub fn corpus(count: usize, directed: bool, seed: u64) -> Vec<Graph> {
    const DENSITIES: [f64; 4] = [0.02, 0.1, 0.3, 0.7];
    (0..count)
        .map(|i| {
            let n = 10 + (i * 37) % 191;
            let p = DENSITIES[i % DENSITIES.len()];
            fuzzmap::generate::gnp(n, p, directed, seed + i as u64)
        })
        .collect()
}
