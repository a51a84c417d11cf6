use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kor_core::bench::{render_table, run_benchmark, BenchConfig};
use kor_core::gen::{generate_graph, BudgetModel, GenSpec};
use kor_core::graph::{read_graph_file, write_graph_file};
use kor_core::{
    all_pairs_best, kkr_bucketbound, kkr_exact, kkr_osscaling, kor_greedy, BucketBoundOptions, Graph, GreedyMode,
    GreedyOptions, InvertedIndex, KorError, LazyTables, OsScalingOptions, PathTables, PreprocessTables, Query,
    RouteResult,
};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Above this many nodes, preprocessing gets a warning.
const LARGE_GRAPH: usize = 25_000;
/// Without `--pre`, graphs up to this size get dense tables in memory.
const DENSE_IN_MEMORY: usize = 2_000;

#[derive(Parser)]
#[command(name = "kor", version, about = "Keyword-aware optimal route search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all-pairs path tables for a graph.
    Preprocess {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a route query.
    Query(QueryArgs),
    /// Answer a route query by exhaustive enumeration (small graphs only).
    Oracle(QueryArgs),
    /// Generate a synthetic graph.
    Gen(GenArgs),
    /// Run a benchmark grid described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Osscaling,
    Bucketbound,
    Greedy,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Keyword,
    Budget,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Tables from `kor preprocess`; computed on the fly when omitted.
    #[arg(long)]
    pre: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "osscaling")]
    algo: Algo,
    #[arg(long)]
    source: usize,
    #[arg(long)]
    target: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, value_delimiter = ',', default_value = "")]
    keywords: Vec<String>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.2)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    width: u8,
    #[arg(long, value_enum, default_value = "keyword")]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    no_opt1: bool,
    #[arg(long)]
    no_opt2: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long, default_value_t = 200)]
    vocab: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Uniform budgets in [lo, hi] instead of planar distances, as `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    uniform_budget: Option<Vec<f64>>,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<KorError> for Failure {
    fn from(e: KorError) -> Self {
        match e {
            KorError::Parameter(_) | KorError::UnknownNode(_) | KorError::OracleLimit(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Io(e.to_string()),
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    read_graph_file(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn preprocess(graph: &Path, out: &Path) -> Result<u8, Failure> {
    let g = load_graph(graph)?;
    let n = g.node_count();
    if n > LARGE_GRAPH {
        eprintln!("warning: {n} nodes; cubic preprocessing will be slow");
    }
    let bytes = PreprocessTables::footprint(n);
    if bytes > 1 << 32 {
        eprintln!("warning: tables need about {} MiB", bytes >> 20);
    }
    let tables = all_pairs_best(&g);
    tables
        .write_file(out)
        .map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    Ok(0)
}

fn row(query: &Query, r: &RouteResult, runtime_ms: f64) -> Value {
    json!({
        "query": query,
        "algorithm": r.algorithm.name(),
        "params": r.params,
        "route": r.route,
        "objective": r.objective,
        "budget": r.budget,
        "feasible": r.feasible,
        "runtime_ms": runtime_ms,
        "labels_generated": r.stats.labels_generated,
    })
}

fn answer(args: &QueryArgs, algo: Algo) -> Result<u8, Failure> {
    let graph = load_graph(&args.graph)?;
    let query = Query::new(args.source, args.target, args.keywords.iter().filter(|s| !s.is_empty()), args.delta);
    query.validate(&graph)?;
    let dense;
    let lazy;
    let tables: &dyn PathTables = match &args.pre {
        Some(path) => {
            dense = PreprocessTables::read_file(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            dense.check_against(&graph)?;
            &dense
        }
        None if graph.node_count() <= DENSE_IN_MEMORY => {
            dense = all_pairs_best(&graph);
            &dense
        }
        None => {
            lazy = LazyTables::new(&graph);
            &lazy
        }
    };
    let index = InvertedIndex::build(&graph);

    let start = Instant::now();
    let results = match algo {
        Algo::Osscaling => {
            let opts = OsScalingOptions {
                epsilon: args.epsilon,
                strategy1: !args.no_opt1,
                strategy2: !args.no_opt2,
                ..OsScalingOptions::default()
            };
            kkr_osscaling(&graph, tables, &index, &query, &opts, args.k)?
        }
        Algo::Bucketbound => {
            let opts = BucketBoundOptions {
                strategy2: !args.no_opt2,
                ..BucketBoundOptions::new(args.epsilon, args.beta)
            };
            kkr_bucketbound(&graph, tables, &index, &query, &opts, args.k)?
        }
        Algo::Greedy => {
            let opts = GreedyOptions {
                alpha: args.alpha,
                width: args.width,
                mode: match args.mode {
                    Mode::Keyword => GreedyMode::Keyword,
                    Mode::Budget => GreedyMode::Budget,
                },
            };
            kor_greedy(&graph, tables, &index, &query, &opts)?.into_iter().collect()
        }
        Algo::Oracle => kkr_exact(&graph, &query, args.k)?,
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let name = match algo {
        Algo::Osscaling => "osscaling",
        Algo::Bucketbound => "bucketbound",
        Algo::Greedy => "greedy",
        Algo::Oracle => "oracle",
    };
    if results.is_empty() {
        println!(
            "{}",
            json!({
                "query": query,
                "algorithm": name,
                "route": null,
                "feasible": false,
                "runtime_ms": runtime_ms,
                "reason": "no feasible route",
            })
        );
        return Ok(EXIT_INFEASIBLE);
    }
    for r in &results {
        println!("{}", row(&query, r, runtime_ms));
    }
    Ok(if results[0].feasible { 0 } else { EXIT_INFEASIBLE })
}

fn generate(args: &GenArgs) -> Result<u8, Failure> {
    let budget = match args.uniform_budget.as_deref() {
        Some(&[lo, hi]) => BudgetModel::Uniform { lo, hi },
        _ => BudgetModel::Planar,
    };
    let spec = GenSpec {
        nodes: args.nodes,
        degree: args.degree,
        vocab: args.vocab,
        seed: args.seed,
        budget,
        ..GenSpec::default()
    };
    let g = generate_graph(&spec)?;
    write_graph_file(&g, &args.out).map_err(|e| Failure::Io(format!("{}: {e}", args.out.display())))?;
    eprintln!("{} nodes, {} edges", g.node_count(), g.edge_count());
    Ok(0)
}

fn bench(config: &Path, out: &Path) -> Result<u8, Failure> {
    let text = fs::read_to_string(config).map_err(|e| Failure::Io(format!("{}: {e}", config.display())))?;
    let config: BenchConfig = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config: {e}")))?;
    let report = run_benchmark(&config)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(out, json).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    print!("{}", render_table(&report));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Preprocess { graph, out } => preprocess(graph, out),
        Command::Query(args) => answer(args, args.algo),
        Command::Oracle(args) => answer(args, Algo::Oracle),
        Command::Gen(args) => generate(args),
        Command::Bench { config, out } => bench(config, out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
