//! Lossy graph compression into a k-dimensional point set.
//!
//! Each node becomes a point (via FastMap over the graph distance) plus two
//! radii. An adjacency query compares the Euclidean distance between two points
//! with those radii: inside the inner radius is a guaranteed yes, at or past the
//! outer radius a guaranteed no, and anything in between gets a likelihood from
//! a small Mamdani fuzzy system. Storage is `n * (k + 2)` numbers instead of an
//! edge list.
//!
//! ```
//! use fuzzmap::{fuzzy::default_system, graph::parse_edge_list, oracle::{Answer, CompressedGraph}};
//!
//! let g = parse_edge_list("1 2\n2 3\n3 4\n".as_bytes(), false).unwrap();
//! let cg = CompressedGraph::build(&g, 2, 7, true, default_system()).unwrap();
//! let (a, b) = (g.internal_id(1).unwrap(), g.internal_id(2).unwrap());
//! match cg.query(a, b).unwrap() {
//!     Answer::Definite(adjacent) => assert!(adjacent),
//!     Answer::Fuzzy(p) => assert!((0.0..=1.0).contains(&p)),
//! }
//! ```

pub mod eval;
pub mod fastmap;
pub mod fuzzy;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod radii;

pub use fastmap::{fastmap_embed, Embedding};
pub use fuzzy::{default_system, parse_fcl, FuzzySystem};
pub use graph::{parse_edge_list, Graph, NodeId};
pub use oracle::{Answer, CompressedGraph};
pub use radii::{compute_radii, NodeRadii, Radius};
