//! The compressed graph model and its adjacency queries.
//!
//! A query measures the embedded distance `d` between two nodes and answers a
//! definite yes if `d` is inside either node's yes-radius, a definite no if it
//! reaches either node's no-radius, and otherwise asks the fuzzy system for a
//! likelihood using the crisp input `(R - d) / (R - r)` of each endpoint.

mod format;

pub use format::{body_size, file_size, load, save, FormatError, HEADER_LEN, MAGIC, VERSION};

use thiserror::Error;

use crate::fastmap::{fastmap_embed, EmbedError, Embedding};
use crate::fuzzy::FuzzySystem;
use crate::graph::{Graph, NodeId};
use crate::radii::{compute_all_radii, NodeRadii, Radius};

/// Likelihood reported when neither endpoint yields a usable fuzzy input.
pub const UNDECIDED: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum QueryError {
    #[error("self query")]
    SelfQuery,
    #[error("node id {id} out of range for {n} nodes")]
    OutOfRange { id: NodeId, n: usize },
    #[error("model is directed; use a directed query")]
    DirectedModel,
    #[error("model is undirected; use an undirected query")]
    UndirectedModel,
}

/// Outcome of an adjacency query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Answer {
    /// Guaranteed correct: `true` for adjacent, `false` for not adjacent.
    Definite(bool),
    /// Likelihood of adjacency in `[0, 1]`.
    Fuzzy(f64),
}

impl Answer {
    pub fn is_definite(&self) -> bool {
        matches!(self, Answer::Definite(_))
    }
}

/// Embedding, radii and fuzzy system for one graph. Storage is linear in `n`.
#[derive(Debug, Clone)]
pub struct CompressedGraph {
    embedding: Embedding,
    radii: NodeRadii,
    directed: bool,
    fuzzy: FuzzySystem,
    external_ids: Vec<u64>,
}

impl CompressedGraph {
    /// Embeds `g` with FastMap and computes radii for every node.
    pub fn build(
        g: &Graph,
        k: usize,
        seed: u64,
        quantize: bool,
        fuzzy: FuzzySystem,
    ) -> Result<Self, EmbedError> {
        let embedding = fastmap_embed(g, k, seed)?;
        let radii = compute_all_radii(g, &embedding, quantize)?;
        Ok(CompressedGraph {
            embedding,
            radii,
            directed: g.is_directed(),
            fuzzy,
            external_ids: g.external_ids().to_vec(),
        })
    }

    pub(crate) fn from_parts(
        embedding: Embedding,
        radii: NodeRadii,
        directed: bool,
        fuzzy: FuzzySystem,
        external_ids: Vec<u64>,
    ) -> Self {
        CompressedGraph {
            embedding,
            radii,
            directed,
            fuzzy,
            external_ids,
        }
    }

    pub fn node_count(&self) -> usize {
        self.embedding.len()
    }

    pub fn dimensions(&self) -> usize {
        self.embedding.dimensions()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_quantized(&self) -> bool {
        self.radii.is_quantized()
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn radii(&self) -> &NodeRadii {
        &self.radii
    }

    pub fn fuzzy(&self) -> &FuzzySystem {
        &self.fuzzy
    }

    pub fn external_ids(&self) -> &[u64] {
        &self.external_ids
    }

    pub fn internal_id(&self, external: u64) -> Option<NodeId> {
        self.external_ids
            .binary_search(&external)
            .ok()
            .map(|i| i as NodeId)
    }

    /// Numeric cells held per model: `n * (k + 2)`.
    pub fn storage_cells(&self) -> usize {
        self.node_count() * (self.dimensions() + 2)
    }

    fn check_pair(&self, u: NodeId, v: NodeId) -> Result<(), QueryError> {
        let n = self.node_count();
        for id in [u, v] {
            if id as usize >= n {
                return Err(QueryError::OutOfRange { id, n });
            }
        }
        if u == v {
            return Err(QueryError::SelfQuery);
        }
        Ok(())
    }

    /// Undirected adjacency query.
    pub fn query(&self, u: NodeId, v: NodeId) -> Result<Answer, QueryError> {
        if self.directed {
            return Err(QueryError::DirectedModel);
        }
        self.check_pair(u, v)?;
        let d = self.embedding.distance_unchecked(u, v);
        Ok(classify_pair(d, self.radii.get(u), self.radii.get(v), &self.fuzzy))
    }

    /// Directed query for the arc `u -> v`; only `u`'s radii are consulted.
    pub fn query_directed(&self, u: NodeId, v: NodeId) -> Result<Answer, QueryError> {
        if !self.directed {
            return Err(QueryError::UndirectedModel);
        }
        self.check_pair(u, v)?;
        let d = self.embedding.distance_unchecked(u, v);
        Ok(classify_arc(d, self.radii.get(u), &self.fuzzy))
    }

    /// Dispatches to [`Self::query`] or [`Self::query_directed`] by model orientation.
    pub fn ask(&self, u: NodeId, v: NodeId) -> Result<Answer, QueryError> {
        if self.directed {
            self.query_directed(u, v)
        } else {
            self.query(u, v)
        }
    }
}

/// Crisp fuzzy input for one endpoint, or `None` when its no-radius is absent.
fn crisp_input(d: f64, side: Radius) -> Option<f64> {
    if !side.has_no() {
        return None;
    }
    let x = (side.no - d) / (side.no - side.yes);
    if x.is_nan() {
        return None;
    }
    Some(x.clamp(0.0, 1.0))
}

/// Undirected decision for embedded distance `d` between endpoints with radii `a` and `b`.
pub fn classify_pair(d: f64, a: Radius, b: Radius, fuzzy: &FuzzySystem) -> Answer {
    if d <= a.yes || d <= b.yes {
        return Answer::Definite(true);
    }
    if d >= a.no || d >= b.no {
        return Answer::Definite(false);
    }
    let likelihood = [crisp_input(d, a), crisp_input(d, b)]
        .into_iter()
        .flatten()
        .map(|x| fuzzy.evaluate_unchecked(x))
        .reduce(f64::min)
        .unwrap_or(UNDECIDED);
    Answer::Fuzzy(likelihood)
}

/// Directed decision for an arc whose source has radii `source`.
pub fn classify_arc(d: f64, source: Radius, fuzzy: &FuzzySystem) -> Answer {
    if d <= source.yes {
        Answer::Definite(true)
    } else if d >= source.no {
        Answer::Definite(false)
    } else {
        let likelihood = crisp_input(d, source)
            .map(|x| fuzzy.evaluate_unchecked(x))
            .unwrap_or(UNDECIDED);
        Answer::Fuzzy(likelihood)
    }
}
