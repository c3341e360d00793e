//! Edge-list ingestion and exact adjacency ground truth.
//!
//! External node ids are arbitrary `u64` values; they are remapped to dense
//! internal ids `0..n` in ascending external-id order, so the result does not
//! depend on the order of lines in the input.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;

use thiserror::Error;

/// Dense internal node id.
pub type NodeId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected two integer node ids, found {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("empty graph")]
    Empty,
    #[error("input is not valid UTF-8: {0}")]
    Encoding(#[from] std::string::FromUtf8Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("node id {id} out of range for graph with {n} nodes")]
    OutOfRange { id: NodeId, n: usize },
    #[error("self query")]
    SelfQuery,
}

/// Counters collected while parsing an edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub edge_lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Simple graph over dense ids, immutable after construction.
///
/// Neighbor lists are sorted and duplicate free. For directed graphs they hold
/// out-neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    directed: bool,
    adjacency: Vec<Vec<NodeId>>,
    external_ids: Vec<u64>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from pairs of external ids. Self-loops and duplicates are dropped.
    pub fn from_edges<I>(edges: I, directed: bool) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        Self::from_edges_with_stats(edges, directed).map(|(g, _)| g)
    }

    fn from_edges_with_stats<I>(edges: I, directed: bool) -> Result<(Self, ParseStats), GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut stats = ParseStats::default();
        let mut pairs = BTreeSet::new();
        let mut ids = BTreeSet::new();
        for (a, b) in edges {
            stats.edge_lines += 1;
            if a == b {
                stats.self_loops += 1;
                continue;
            }
            ids.insert(a);
            ids.insert(b);
            let key = if directed || a < b { (a, b) } else { (b, a) };
            if !pairs.insert(key) {
                stats.duplicates += 1;
            }
        }
        if ids.is_empty() {
            return Err(GraphError::Empty);
        }

        let external_ids: Vec<u64> = ids.into_iter().collect();
        let dense: HashMap<u64, NodeId> = external_ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as NodeId))
            .collect();

        let mut adjacency = vec![Vec::new(); external_ids.len()];
        for &(a, b) in &pairs {
            let (u, v) = (dense[&a], dense[&b]);
            adjacency[u as usize].push(v);
            if !directed {
                adjacency[v as usize].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let graph = Graph {
            directed,
            adjacency,
            external_ids,
            edge_count: pairs.len(),
        };
        Ok((graph, stats))
    }

    /// Builds a graph directly over dense ids `0..n`; external ids equal internal ids.
    ///
    /// Unlike [`Graph::from_edges`], nodes without incident edges are kept.
    pub fn from_dense_edges<I>(n: usize, edges: I, directed: bool) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for id in [u, v] {
                if id as usize >= n {
                    return Err(GraphError::OutOfRange { id, n });
                }
            }
            if u == v {
                continue;
            }
            adjacency[u as usize].push(v);
            if !directed {
                adjacency[v as usize].push(u);
            }
        }
        let mut degree_sum = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            degree_sum += list.len();
        }
        let edge_count = if directed { degree_sum } else { degree_sum / 2 };
        Ok(Graph {
            directed,
            adjacency,
            external_ids: (0..n as u64).collect(),
            edge_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Sorted neighbor list (out-neighbors when directed).
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u as usize]
    }

    /// Unchecked membership test; panics on out-of-range ids.
    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Ground-truth adjacency: true iff the edge (arc `u -> v` when directed) exists.
    pub fn adjacent(&self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        self.check_id(u)?;
        self.check_id(v)?;
        if u == v {
            return Err(GraphError::SelfQuery);
        }
        Ok(self.has_edge(u, v))
    }

    pub fn check_id(&self, id: NodeId) -> Result<(), GraphError> {
        if (id as usize) < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::OutOfRange {
                id,
                n: self.node_count(),
            })
        }
    }

    /// External ids indexed by internal id.
    pub fn external_ids(&self) -> &[u64] {
        &self.external_ids
    }

    pub fn external_id(&self, u: NodeId) -> u64 {
        self.external_ids[u as usize]
    }

    /// Looks up the internal id of an external id.
    pub fn internal_id(&self, external: u64) -> Option<NodeId> {
        self.external_ids
            .binary_search(&external)
            .ok()
            .map(|i| i as NodeId)
    }

    /// Iterates edges once each as internal id pairs (`u < v` when undirected).
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(move |(u, list)| {
            let u = u as NodeId;
            list.iter()
                .copied()
                .filter(move |&v| self.directed || u < v)
                .map(move |v| (u, v))
        })
    }

    /// Canonical edge list text using external ids.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", self.external_id(u), self.external_id(v)));
        }
        out
    }
}

/// Parses edge-list text; see [`parse_edge_list_with_stats`].
pub fn parse_edge_list<R: Read>(input: R, directed: bool) -> Result<Graph, GraphError> {
    parse_edge_list_with_stats(input, directed).map(|(g, _)| g)
}

/// Parses an edge list: one edge per line, two non-negative integer ids split by
/// whitespace or a single comma. Blank lines and lines starting with `#` or `%`
/// are ignored.
pub fn parse_edge_list_with_stats<R: Read>(
    mut input: R,
    directed: bool,
) -> Result<(Graph, ParseStats), GraphError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes)?;

    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let pair = split_pair(line).ok_or_else(|| GraphError::MalformedLine {
            line: idx + 1,
            content: line.to_string(),
        })?;
        edges.push(pair);
    }

    let (graph, stats) = Graph::from_edges_with_stats(edges, directed)?;
    if stats.self_loops > 0 {
        log::warn!("skipped {} self-loop line(s)", stats.self_loops);
    }
    Ok((graph, stats))
}

fn split_pair(line: &str) -> Option<(u64, u64)> {
    let (a, b) = match line.split_once(',') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => {
            let mut tokens = line.split_whitespace();
            let pair = (tokens.next()?, tokens.next()?);
            if tokens.next().is_some() {
                return None;
            }
            pair
        }
    };
    Some((a.parse().ok()?, b.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIX_NODES: &str = "1 2\n1 5\n2 3\n2 4\n2 5\n3 5\n4 6\n5 6\n";

    fn ext_neighbors(g: &Graph, ext: u64) -> Vec<u64> {
        let u = g.internal_id(ext).unwrap();
        g.neighbors(u).iter().map(|&v| g.external_id(v)).collect()
    }

    #[test]
    fn two_line_list() {
        let g = parse_edge_list("1 2\n1 5\n".as_bytes(), false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(ext_neighbors(&g, 1), vec![2, 5]);
    }

    #[test]
    fn six_node_neighbors_of_one() {
        let g = parse_edge_list(SIX_NODES.as_bytes(), false).unwrap();
        assert_eq!(ext_neighbors(&g, 1), vec![2, 5]);
        let id = |e| g.internal_id(e).unwrap();
        assert!(g.adjacent(id(1), id(5)).unwrap());
        for other in [3, 4, 6] {
            assert!(!g.adjacent(id(1), id(other)).unwrap());
        }
    }

    #[test]
    fn comments_and_duplicates() {
        let (g, stats) =
            parse_edge_list_with_stats("# comment\n7 9\n7 9\n".as_bytes(), false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.duplicates, 1);
    }

    #[test]
    fn separators_and_percent_comments() {
        let g = parse_edge_list("% header\n1,2\n2\t3\n\n3 , 4\r\n".as_bytes(), false).unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_edge_list("1 2\n3\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, GraphError::MalformedLine { line: 2, .. }), "{err}");
        let err = parse_edge_list("1 2 3\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, GraphError::MalformedLine { line: 1, .. }));
        let err = parse_edge_list("1,,2\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, GraphError::MalformedLine { line: 1, .. }));
        let err = parse_edge_list("-1 2\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, GraphError::MalformedLine { .. }));
    }

    #[test]
    fn self_loops_are_skipped() {
        let (g, stats) = parse_edge_list_with_stats("1 1\n1 2\n".as_bytes(), false).unwrap();
        assert_eq!(stats.self_loops, 1);
        assert_eq!(g.node_count(), 2);
        let err = parse_edge_list("4 4\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, GraphError::Empty));
    }

    #[test]
    fn empty_input() {
        let err = parse_edge_list("# nothing\n\n".as_bytes(), false).unwrap_err();
        assert_eq!(err.to_string(), "empty graph");
    }

    #[test]
    fn self_query_and_range_errors() {
        let g = parse_edge_list("1 2\n".as_bytes(), false).unwrap();
        assert!(matches!(g.adjacent(0, 0), Err(GraphError::SelfQuery)));
        assert!(matches!(g.adjacent(0, 7), Err(GraphError::OutOfRange { id: 7, .. })));
    }

    #[test]
    fn directed_keeps_orientation() {
        let g = parse_edge_list("1 2\n2 1\n2 3\n".as_bytes(), true).unwrap();
        assert_eq!(g.edge_count(), 3);
        let id = |e| g.internal_id(e).unwrap();
        assert!(g.adjacent(id(2), id(3)).unwrap());
        assert!(!g.adjacent(id(3), id(2)).unwrap());
    }

    #[test]
    fn sparse_external_ids() {
        let g = parse_edge_list("1000000000000 5\n".as_bytes(), false).unwrap();
        assert_eq!(g.external_ids(), &[5, 1_000_000_000_000]);
    }
}
