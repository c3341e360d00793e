//! Accuracy measurements for a compressed graph against its source graph:
//! share of definite answers, their correctness, and how often fuzzy answers
//! land on the right side of 0.5.

use std::fmt::Write as _;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::fastmap::EmbedError;
use crate::fuzzy::FuzzySystem;
use crate::graph::{Graph, NodeId};
use crate::oracle::{Answer, CompressedGraph};

pub const CSV_HEADER: &str =
    "k,pairs,definite_pct,definite_correct_pct,fuzzy_pairs,fuzzy_sound_yes_pct,fuzzy_sound_no_pct,seed,sample_size";

/// Default number of sampled pairs.
pub const DEFAULT_SAMPLE: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("model has {model} nodes but graph has {graph}")]
    Mismatch { model: usize, graph: usize },
    #[error("model and graph use different node ids")]
    IdMap,
    #[error("model is {model} but graph is {graph}")]
    Orientation { model: &'static str, graph: &'static str },
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("no dimensions to sweep")]
    NoDimensions,
    #[error(transparent)]
    Build(#[from] EmbedError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// Which node pairs to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSize {
    All,
    Pairs(usize),
}

impl std::fmt::Display for SampleSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleSize::All => f.write_str("ALL"),
            SampleSize::Pairs(m) => write!(f, "{m}"),
        }
    }
}

/// Raw counts behind an [`EvalReport`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub pairs: u64,
    pub definite: u64,
    pub definite_correct: u64,
    pub fuzzy_neighbors: u64,
    pub fuzzy_neighbors_sound: u64,
    pub fuzzy_non_neighbors: u64,
    pub fuzzy_non_neighbors_sound: u64,
}

impl Tally {
    fn record(&mut self, answer: Answer, truth: bool) {
        self.pairs += 1;
        match answer {
            Answer::Definite(value) => {
                self.definite += 1;
                if value == truth {
                    self.definite_correct += 1;
                }
            }
            Answer::Fuzzy(p) if truth => {
                self.fuzzy_neighbors += 1;
                if p > 0.5 {
                    self.fuzzy_neighbors_sound += 1;
                }
            }
            Answer::Fuzzy(p) => {
                self.fuzzy_non_neighbors += 1;
                if p < 0.5 {
                    self.fuzzy_non_neighbors_sound += 1;
                }
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.pairs += other.pairs;
        self.definite += other.definite;
        self.definite_correct += other.definite_correct;
        self.fuzzy_neighbors += other.fuzzy_neighbors;
        self.fuzzy_neighbors_sound += other.fuzzy_neighbors_sound;
        self.fuzzy_non_neighbors += other.fuzzy_non_neighbors;
        self.fuzzy_non_neighbors_sound += other.fuzzy_non_neighbors_sound;
        self
    }

    pub fn fuzzy(&self) -> u64 {
        self.fuzzy_neighbors + self.fuzzy_non_neighbors
    }
}

fn pct(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

/// Measurements for one model. Percentages with an empty denominator are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub seed: u64,
    pub sample_size: SampleSize,
    pub tally: Tally,
}

impl EvalReport {
    pub fn pairs_evaluated(&self) -> u64 {
        self.tally.pairs
    }

    pub fn definite_pct(&self) -> Option<f64> {
        pct(self.tally.definite, self.tally.pairs)
    }

    pub fn definite_correct_pct(&self) -> Option<f64> {
        pct(self.tally.definite_correct, self.tally.definite)
    }

    pub fn fuzzy_pct(&self) -> Option<f64> {
        pct(self.tally.fuzzy(), self.tally.pairs)
    }

    pub fn fuzzy_sound_yes_pct(&self) -> Option<f64> {
        pct(self.tally.fuzzy_neighbors_sound, self.tally.fuzzy_neighbors)
    }

    pub fn fuzzy_sound_no_pct(&self) -> Option<f64> {
        pct(self.tally.fuzzy_non_neighbors_sound, self.tally.fuzzy_non_neighbors)
    }

    /// One CSV row matching [`CSV_HEADER`], without a line terminator.
    pub fn csv_row(&self) -> String {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.k,
            self.tally.pairs,
            cell(self.definite_pct()),
            cell(self.definite_correct_pct()),
            self.tally.fuzzy(),
            cell(self.fuzzy_sound_yes_pct()),
            cell(self.fuzzy_sound_no_pct()),
            self.seed,
            self.sample_size,
        )
    }
}

/// Writes the header and one row per report, `\n` terminated.
pub fn write_csv<W: Write>(reports: &[EvalReport], mut out: W) -> io::Result<()> {
    let mut text = String::new();
    text.push_str(CSV_HEADER);
    text.push('\n');
    for r in reports {
        let _ = writeln!(text, "{}", r.csv_row());
    }
    out.write_all(text.as_bytes())
}

/// Pair space: unordered pairs `u < v`, or ordered pairs `u != v` when directed.
struct PairSpace {
    n: u64,
    directed: bool,
}

impl PairSpace {
    fn len(&self) -> u64 {
        if self.directed {
            self.n * (self.n - 1)
        } else {
            self.n * (self.n - 1) / 2
        }
    }

    fn pair(&self, index: u64) -> (NodeId, NodeId) {
        let n = self.n;
        if self.directed {
            let u = index / (n - 1);
            let mut v = index % (n - 1);
            if v >= u {
                v += 1;
            }
            return (u as NodeId, v as NodeId);
        }
        // row u holds pairs (u, u+1..n); offset(u) = u(2n - u - 1)/2
        let offset = |u: u64| u * (2 * n - u - 1) / 2;
        let (mut lo, mut hi) = (0, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if offset(mid) <= index {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u = lo;
        let v = u + 1 + (index - offset(u));
        (u as NodeId, v as NodeId)
    }
}

/// Pair indices to evaluate, sorted; uniform without replacement, fixed by `seed`.
fn select_pairs(space: &PairSpace, sample: SampleSize, seed: u64) -> Option<Vec<u64>> {
    let total = space.len();
    match sample {
        SampleSize::Pairs(m) if (m as u64) < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<u64> = rand::seq::index::sample(&mut rng, total as usize, m)
                .into_iter()
                .map(|i| i as u64)
                .collect();
            picked.sort_unstable();
            Some(picked)
        }
        _ => None,
    }
}

/// Queries the selected pairs of `g` against `cg` and tallies the outcome.
pub fn evaluate_model(
    cg: &CompressedGraph,
    g: &Graph,
    sample: SampleSize,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    if cg.node_count() != g.node_count() {
        return Err(EvalError::Mismatch {
            model: cg.node_count(),
            graph: g.node_count(),
        });
    }
    if cg.external_ids() != g.external_ids() {
        return Err(EvalError::IdMap);
    }
    if cg.is_directed() != g.is_directed() {
        let label = |d: bool| if d { "directed" } else { "undirected" };
        return Err(EvalError::Orientation {
            model: label(cg.is_directed()),
            graph: label(g.is_directed()),
        });
    }
    if sample == SampleSize::Pairs(0) {
        return Err(EvalError::EmptySample);
    }

    let space = PairSpace {
        n: g.node_count() as u64,
        directed: g.is_directed(),
    };
    let judge = |index: u64| {
        let (u, v) = space.pair(index);
        let answer = cg.ask(u, v).expect("pair ids are valid and distinct");
        let mut t = Tally::default();
        t.record(answer, g.has_edge(u, v));
        t
    };
    let tally = match select_pairs(&space, sample, seed) {
        Some(picked) => picked.par_iter().map(|&i| judge(i)).reduce(Tally::default, Tally::merge),
        None => (0..space.len()).into_par_iter().map(judge).reduce(Tally::default, Tally::merge),
    };

    Ok(EvalReport {
        k: cg.dimensions(),
        seed,
        sample_size: sample,
        tally,
    })
}

/// Builds and evaluates one model per dimension in `k_values`, all with `seed`.
pub fn sweep_k(
    g: &Graph,
    k_values: &[usize],
    quantize: bool,
    seed: u64,
    sample: SampleSize,
    fuzzy: &FuzzySystem,
) -> Result<Vec<EvalReport>, EvalError> {
    if k_values.is_empty() {
        return Err(EvalError::NoDimensions);
    }
    k_values
        .iter()
        .map(|&k| {
            let cg = CompressedGraph::build(g, k, seed, quantize, fuzzy.clone())?;
            let report = evaluate_model(&cg, g, sample, seed)?;
            log::info!("k={k}: {}", report.csv_row());
            Ok(report)
        })
        .collect()
}
