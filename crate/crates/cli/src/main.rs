use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use fuzzmap::eval::{evaluate_model, sweep_k, write_csv, EvalError, SampleSize, DEFAULT_SAMPLE};
use fuzzmap::fastmap::EmbedError;
use fuzzmap::fuzzy::FclError;
use fuzzmap::graph::{parse_edge_list_with_stats, GraphError};
use fuzzmap::oracle::{self, FormatError, QueryError};
use fuzzmap::{default_system, parse_fcl, Answer, CompressedGraph, FuzzySystem, Graph};
use thiserror::Error;

const THREADS_VAR: &str = "FUZZMAP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fuzzmap", version, about = "Compress graphs into FastMap coordinates with fuzzy adjacency queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a model from an edge list and write it as an FZG1 file.
    Compress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        quantize: Quantize,
        /// Treat each line as an arc `u -> v`.
        #[arg(long)]
        directed: bool,
        /// Fuzzy system to embed instead of the built-in default.
        #[arg(long)]
        fcl: Option<PathBuf>,
    },
    /// Ask whether two nodes (external ids) are adjacent.
    Query {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        u: u64,
        #[arg(long)]
        v: u64,
    },
    /// Compare a model's answers with the graph it was built from.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = Sample(SampleSize::Pairs(DEFAULT_SAMPLE)))]
        sample: Sample,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and evaluate one model per dimension in a range.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        /// Dimensions as `lo:hi[:step]` (inclusive) or a single value.
        #[arg(long)]
        k: KRange,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = Sample(SampleSize::Pairs(DEFAULT_SAMPLE)))]
        sample: Sample,
        #[command(flatten)]
        quantize: Quantize,
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the header fields of a model file.
    Info { model: PathBuf },
}

#[derive(Debug, Args)]
struct Quantize {
    /// Round radii to integers (default).
    #[arg(long, overrides_with = "no_quantize")]
    quantize: bool,
    /// Keep radii as exact embedded distances.
    #[arg(long, overrides_with = "quantize")]
    no_quantize: bool,
}

impl Quantize {
    fn enabled(&self) -> bool {
        !self.no_quantize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sample(SampleSize);

impl FromStr for Sample {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Sample(SampleSize::All));
        }
        match s.parse::<usize>() {
            Ok(0) => Err("sample size must be at least 1".into()),
            Ok(m) => Ok(Sample(SampleSize::Pairs(m))),
            Err(_) => Err(format!("expected a pair count or `all`, got {s:?}")),
        }
    }
}

impl std::fmt::Display for Sample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct KRange(Vec<usize>);

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields = s
            .split(':')
            .map(|f| f.trim().parse::<usize>().map_err(|_| format!("bad k range {s:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        let (lo, hi, step) = match fields[..] {
            [k] => (k, k, 1),
            [lo, hi] => (lo, hi, 1),
            [lo, hi, step] => (lo, hi, step),
            _ => return Err(format!("bad k range {s:?}; expected lo:hi[:step]")),
        };
        if lo == 0 || hi < lo || step == 0 {
            return Err(format!("bad k range {s:?}; need 1 <= lo <= hi and step >= 1"));
        }
        Ok(KRange((lo..=hi).step_by(step).collect()))
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Graph { path: PathBuf, source: GraphError },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("{}: {source}", path.display())]
    Fcl { path: PathBuf, source: FclError },
    #[error(transparent)]
    Build(#[from] EmbedError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Query(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Query(_) => 3,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_graph(path: &Path, directed: bool) -> Result<Graph, CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    let (g, stats) = parse_edge_list_with_stats(BufReader::new(file), directed).map_err(|source| {
        CliError::Graph {
            path: path.to_path_buf(),
            source,
        }
    })?;
    log::info!(
        "{}: {} nodes, {} edges ({} self-loops, {} duplicates skipped)",
        path.display(),
        g.node_count(),
        g.edge_count(),
        stats.self_loops,
        stats.duplicates
    );
    Ok(g)
}

fn read_fcl(path: &Path) -> Result<FuzzySystem, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_fcl(&text).map_err(|source| CliError::Fcl {
        path: path.to_path_buf(),
        source,
    })
}

fn read_model(path: &Path) -> Result<CompressedGraph, CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    oracle::load(BufReader::new(file)).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs `body` against the named file or standard output, flushing at the end.
fn with_output<F>(out: Option<&Path>, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|()| w.flush()).map_err(io_err(path))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w).and_then(|()| w.flush()).map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn compress(
    input: &Path,
    output: &Path,
    k: usize,
    seed: u64,
    quantize: bool,
    directed: bool,
    fcl: Option<&Path>,
) -> Result<(), CliError> {
    let fuzzy = match fcl {
        Some(path) => read_fcl(path)?,
        None => default_system(),
    };
    let g = read_graph(input, directed)?;
    let cg = CompressedGraph::build(&g, k, seed, quantize, fuzzy)?;
    let file = File::create(output).map_err(io_err(output))?;
    let mut w = BufWriter::new(file);
    let written = oracle::save(&cg, &mut w).map_err(|source| CliError::Format {
        path: output.to_path_buf(),
        source,
    })?;
    w.flush().map_err(io_err(output))?;
    println!("n={}", cg.node_count());
    println!("k={}", cg.dimensions());
    println!("bytes={written}");
    Ok(())
}

fn query(model: &Path, u: u64, v: u64) -> Result<(), CliError> {
    let cg = read_model(model)?;
    let id = |x: u64| {
        cg.internal_id(x)
            .ok_or_else(|| CliError::Query(format!("node {x} is not in the model")))
    };
    let (iu, iv) = (id(u)?, id(v)?);
    let answer = cg.ask(iu, iv).map_err(|e| match e {
        QueryError::SelfQuery => CliError::Query(format!("self query on node {u}")),
        other => CliError::Query(other.to_string()),
    })?;
    match answer {
        Answer::Definite(true) => println!("yes"),
        Answer::Definite(false) => println!("no"),
        Answer::Fuzzy(p) => println!("fuzzy {p:.4}"),
    }
    Ok(())
}

fn evaluate(model: &Path, graph: &Path, sample: SampleSize, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let cg = read_model(model)?;
    let g = read_graph(graph, cg.is_directed())?;
    let report = evaluate_model(&cg, &g, sample, seed)?;
    with_output(out, |w| write_csv(std::slice::from_ref(&report), w))
}

fn sweep(
    input: &Path,
    ks: &[usize],
    seed: u64,
    sample: SampleSize,
    quantize: bool,
    directed: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let g = read_graph(input, directed)?;
    let reports = sweep_k(&g, ks, quantize, seed, sample, &default_system())?;
    with_output(out, |w| write_csv(&reports, w))
}

fn info(model: &Path) -> Result<(), CliError> {
    let cg = read_model(model)?;
    let size = std::fs::metadata(model).map_err(io_err(model))?.len();
    println!("n={}", cg.node_count());
    println!("k={}", cg.dimensions());
    println!("directed={}", cg.is_directed());
    println!("quantized={}", cg.is_quantized());
    println!("fcl_bytes={}", cg.fuzzy().to_fcl().len());
    println!("bytes={size}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compress {
            input,
            output,
            k,
            seed,
            quantize,
            directed,
            fcl,
        } => compress(&input, &output, k as usize, seed, quantize.enabled(), directed, fcl.as_deref()),
        Command::Query { model, u, v } => query(&model, u, v),
        Command::Evaluate {
            model,
            graph,
            sample,
            seed,
            out,
        } => evaluate(&model, &graph, sample.0, seed, out.as_deref()),
        Command::Sweep {
            input,
            k,
            seed,
            sample,
            quantize,
            directed,
            out,
        } => sweep(&input, &k.0, seed, sample.0, quantize.enabled(), directed, out.as_deref()),
        Command::Info { model } => info(&model),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_VAR} must be a non-negative integer, got {raw:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("{THREADS_VAR}: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn k_ranges() {
        assert_eq!("2:10".parse::<KRange>().unwrap().0, (2..=10).collect::<Vec<_>>());
        assert_eq!("2:10:3".parse::<KRange>().unwrap().0, vec![2, 5, 8]);
        assert_eq!("4".parse::<KRange>().unwrap().0, vec![4]);
        for bad in ["0:3", "5:2", "1:4:0", "a:b", "1:2:3:4", ""] {
            assert!(bad.parse::<KRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sample_sizes() {
        assert_eq!("ALL".parse::<Sample>().unwrap().0, SampleSize::All);
        assert_eq!("all".parse::<Sample>().unwrap().0, SampleSize::All);
        assert_eq!("250".parse::<Sample>().unwrap().0, SampleSize::Pairs(250));
        assert!("0".parse::<Sample>().is_err());
        assert!("-3".parse::<Sample>().is_err());
    }

    #[test]
    fn quantize_defaults_on() {
        let parse = |extra: &[&str]| {
            let mut args = vec!["fuzzmap", "compress", "--input", "a", "--output", "b", "--k", "2"];
            args.extend_from_slice(extra);
            match Cli::try_parse_from(args).unwrap().command {
                Command::Compress { quantize, .. } => quantize.enabled(),
                _ => unreachable!(),
            }
        };
        assert!(parse(&[]));
        assert!(parse(&["--quantize"]));
        assert!(!parse(&["--no-quantize"]));
        assert!(parse(&["--no-quantize", "--quantize"]));
    }

    #[test]
    fn zero_dimensions_rejected() {
        let args = ["fuzzmap", "compress", "--input", "a", "--output", "b", "--k", "0"];
        assert!(Cli::try_parse_from(args).is_err());
    }
}
