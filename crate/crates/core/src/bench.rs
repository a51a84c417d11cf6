//! Benchmark harness: runs a grid of algorithms over generated query sets and
//! reports runtime, label counts, relative ratio against a fine-grained
//! OSScaling baseline, and greedy failure rates.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bucketbound::{kor_bucketbound, BucketBoundOptions};
use crate::error::{KorError, Result};
use crate::gen::{generate_graph, generate_local_queries, generate_queries, GenSpec};
use crate::graph::{read_graph_file, Graph, Route};
use crate::greedy::{kor_greedy, GreedyOptions};
use crate::index::InvertedIndex;
use crate::oracle::kor_exact;
use crate::osscaling::{kor_osscaling, OsScalingOptions};
use crate::preprocess::{all_pairs_best, LazyTables, PathTables, PreprocessTables};
use crate::query::Query;
use crate::result::{GreedyMode, RouteResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphSource {
    Generate(GenSpec),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuerySetSpec {
    pub count: usize,
    /// One query set per keyword count.
    pub keywords: Vec<usize>,
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
    /// Draw targets within this budget of the source.
    #[serde(default)]
    pub reach: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "lowercase")]
pub enum AlgoSpec {
    OsScaling {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "yes")]
        opt1: bool,
        #[serde(default = "yes")]
        opt2: bool,
    },
    BucketBound {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    Greedy {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "one")]
        width: u8,
        #[serde(default = "keyword_mode")]
        mode: GreedyMode,
    },
    Oracle,
}

fn default_epsilon() -> f64 {
    0.5
}
fn default_beta() -> f64 {
    1.2
}
fn default_alpha() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}
fn one() -> u8 {
    1
}
fn keyword_mode() -> GreedyMode {
    GreedyMode::Keyword
}
fn default_baseline() -> f64 {
    0.1
}
fn default_dense_limit() -> usize {
    1200
}

impl AlgoSpec {
    pub fn label(&self) -> String {
        match self {
            AlgoSpec::OsScaling { epsilon, opt1, opt2 } => {
                let mut s = format!("osscaling eps={epsilon}");
                if !opt1 {
                    s.push_str(" -opt1");
                }
                if !opt2 {
                    s.push_str(" -opt2");
                }
                s
            }
            AlgoSpec::BucketBound { epsilon, beta } => format!("bucketbound eps={epsilon} beta={beta}"),
            AlgoSpec::Greedy { alpha, width, mode } => {
                let mode = match mode {
                    GreedyMode::Keyword => "keyword",
                    GreedyMode::Budget => "budget",
                };
                format!("greedy-{width} alpha={alpha} {mode}")
            }
            AlgoSpec::Oracle => "oracle".into(),
        }
    }

    pub fn run(
        &self,
        graph: &Graph,
        tables: &dyn PathTables,
        index: &InvertedIndex,
        query: &Query,
    ) -> Result<Option<RouteResult>> {
        match *self {
            AlgoSpec::OsScaling { epsilon, opt1, opt2 } => {
                let opts = OsScalingOptions {
                    epsilon,
                    strategy1: opt1,
                    strategy2: opt2,
                    ..OsScalingOptions::default()
                };
                kor_osscaling(graph, tables, index, query, &opts)
            }
            AlgoSpec::BucketBound { epsilon, beta } => {
                kor_bucketbound(graph, tables, index, query, &BucketBoundOptions::new(epsilon, beta))
            }
            AlgoSpec::Greedy { alpha, width, mode } => {
                kor_greedy(graph, tables, index, query, &GreedyOptions { alpha, width, mode })
            }
            AlgoSpec::Oracle => kor_exact(graph, query),
        }
    }

    fn is_greedy(&self) -> bool {
        matches!(self, AlgoSpec::Greedy { .. })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableChoice {
    #[default]
    Auto,
    Dense,
    Lazy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub graph: GraphSource,
    pub queries: QuerySetSpec,
    pub algorithms: Vec<AlgoSpec>,
    #[serde(default = "default_baseline")]
    pub baseline_epsilon: f64,
    #[serde(default)]
    pub tables: TableChoice,
    /// `auto` uses dense tables up to this many nodes.
    #[serde(default = "default_dense_limit")]
    pub dense_limit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub query: usize,
    pub keywords: usize,
    pub algorithm: String,
    pub route: Option<Route>,
    pub objective: Option<f64>,
    pub budget: Option<f64>,
    pub feasible: bool,
    pub runtime_ms: f64,
    pub labels_generated: u64,
    pub relative_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub algorithm: String,
    pub keywords: usize,
    pub queries: usize,
    pub feasible: usize,
    pub mean_runtime_ms: f64,
    pub median_runtime_ms: f64,
    pub mean_labels: f64,
    /// Mean of objective / baseline objective over queries both answered.
    pub mean_relative_ratio: Option<f64>,
    pub max_relative_ratio: Option<f64>,
    /// Share of baseline-feasible queries without a feasible answer; greedy
    /// only.
    pub failure_percent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub nodes: usize,
    pub edges: usize,
    pub tables: TableChoice,
    pub baseline_epsilon: f64,
    pub rows: Vec<BenchRow>,
    pub summary: Vec<BenchSummary>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

/// Rechecks a result against the graph; algorithms never get to report
/// their own scores.
pub fn revalidate(graph: &Graph, query: &Query, r: &RouteResult) -> Result<()> {
    let scores = graph.route_scores(&r.route)?;
    let covers = graph.covers(&r.route, &query.keywords);
    let ends = r.route.source() == Some(query.source) && r.route.target() == Some(query.target);
    let feasible = ends && covers && scores.budget <= query.budget_limit;
    if scores.objective != r.objective || scores.budget != r.budget || covers != r.covers || feasible != r.feasible {
        return Err(KorError::Benchmark(format!(
            "result {} for query {}->{} does not match its recomputed scores",
            r.route, query.source, query.target
        )));
    }
    Ok(())
}

enum Tables<'g> {
    Dense(PreprocessTables),
    Lazy(&'g Graph),
}

fn timed(
    spec: &AlgoSpec,
    graph: &Graph,
    tables: &Tables<'_>,
    index: &InvertedIndex,
    query: &Query,
) -> (Result<Option<RouteResult>>, f64) {
    let start = Instant::now();
    let out = match tables {
        Tables::Dense(t) => spec.run(graph, t, index, query),
        // A fresh cache per run, so no algorithm profits from another's work.
        Tables::Lazy(g) => spec.run(graph, &LazyTables::new(g), index, query),
    };
    (out, start.elapsed().as_secs_f64() * 1e3)
}

pub fn load_graph_source(source: &GraphSource) -> Result<Graph> {
    match source {
        GraphSource::Generate(spec) => generate_graph(spec),
        GraphSource::File(path) => read_graph_file(path),
    }
}

/// Runs the configured grid on `graph`, sequentially.
pub fn run_benchmark_on(graph: &Graph, config: &BenchConfig) -> Result<BenchReport> {
    if !(config.baseline_epsilon > 0.0 && config.baseline_epsilon < 1.0) {
        return Err(KorError::Parameter("baseline epsilon must lie in (0,1)".into()));
    }
    let index = InvertedIndex::build(graph);
    let choice = match config.tables {
        TableChoice::Auto if graph.node_count() <= config.dense_limit => TableChoice::Dense,
        TableChoice::Auto => TableChoice::Lazy,
        other => other,
    };
    let tables = match choice {
        TableChoice::Dense => Tables::Dense(all_pairs_best(graph)),
        _ => Tables::Lazy(graph),
    };
    let baseline = AlgoSpec::OsScaling {
        epsilon: config.baseline_epsilon,
        opt1: true,
        opt2: true,
    };

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (set, &m) in config.queries.keywords.iter().enumerate() {
        let seed = config.queries.seed.wrapping_add(set as u64);
        let queries = match config.queries.reach {
            Some(reach) => generate_local_queries(graph, m, config.queries.delta, reach, config.queries.count, seed)?,
            None => generate_queries(graph, m, config.queries.delta, config.queries.count, seed)?,
        };
        let base: Vec<Option<f64>> = queries
            .iter()
            .map(|q| {
                let (r, _) = timed(&baseline, graph, &tables, &index, q);
                match r? {
                    Some(r) => {
                        revalidate(graph, q, &r)?;
                        Ok(r.feasible.then_some(r.objective))
                    }
                    None => Ok(None),
                }
            })
            .collect::<Result<_>>()?;

        for spec in &config.algorithms {
            let label = spec.label();
            let mut set_rows = Vec::with_capacity(queries.len());
            for (qi, q) in queries.iter().enumerate() {
                let (out, runtime_ms) = timed(spec, graph, &tables, &index, q);
                let row = match out {
                    Ok(Some(r)) => {
                        revalidate(graph, q, &r)?;
                        let ratio = match base[qi] {
                            Some(b) if r.feasible && b > 0.0 => Some(r.objective / b),
                            _ => None,
                        };
                        BenchRow {
                            query: qi,
                            keywords: m,
                            algorithm: label.clone(),
                            objective: Some(r.objective),
                            budget: Some(r.budget),
                            feasible: r.feasible,
                            runtime_ms,
                            labels_generated: r.stats.labels_generated,
                            relative_ratio: ratio,
                            route: Some(r.route),
                            error: None,
                        }
                    }
                    Ok(None) | Err(_) => BenchRow {
                        query: qi,
                        keywords: m,
                        algorithm: label.clone(),
                        route: None,
                        objective: None,
                        budget: None,
                        feasible: false,
                        runtime_ms,
                        labels_generated: 0,
                        relative_ratio: None,
                        error: out.err().map(|e| e.to_string()),
                    },
                };
                set_rows.push(row);
            }

            let runtimes: Vec<f64> = set_rows.iter().map(|r| r.runtime_ms).collect();
            let labels: Vec<f64> = set_rows.iter().map(|r| r.labels_generated as f64).collect();
            let ratios: Vec<f64> = set_rows.iter().filter_map(|r| r.relative_ratio).collect();
            let answerable = base.iter().filter(|b| b.is_some()).count();
            let failures = set_rows
                .iter()
                .zip(&base)
                .filter(|(r, b)| b.is_some() && !r.feasible)
                .count();
            summary.push(BenchSummary {
                algorithm: label,
                keywords: m,
                queries: queries.len(),
                feasible: set_rows.iter().filter(|r| r.feasible).count(),
                mean_runtime_ms: mean(&runtimes),
                median_runtime_ms: median(&runtimes),
                mean_labels: mean(&labels),
                mean_relative_ratio: (!ratios.is_empty()).then(|| mean(&ratios)),
                max_relative_ratio: ratios.iter().copied().reduce(f64::max),
                failure_percent: (spec.is_greedy() && answerable > 0)
                    .then(|| 100.0 * failures as f64 / answerable as f64),
            });
            rows.extend(set_rows);
        }
    }
    Ok(BenchReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        tables: choice,
        baseline_epsilon: config.baseline_epsilon,
        rows,
        summary,
    })
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    let graph = load_graph_source(&config.graph)?;
    run_benchmark_on(&graph, config)
}

/// Plain-text summary table.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} nodes, {} edges, {:?} tables, baseline eps={}",
        report.nodes, report.edges, report.tables, report.baseline_epsilon
    );
    let _ = writeln!(
        out,
        "{:<36} {:>3} {:>8} {:>10} {:>10} {:>10} {:>8} {:>8}",
        "algorithm", "m", "feasible", "mean ms", "median ms", "labels", "ratio", "fail %"
    );
    for s in &report.summary {
        let ratio = s.mean_relative_ratio.map_or("-".into(), |r| format!("{r:.4}"));
        let fail = s.failure_percent.map_or("-".into(), |f| format!("{f:.1}"));
        let _ = writeln!(
            out,
            "{:<36} {:>3} {:>8} {:>10.3} {:>10.3} {:>10.1} {:>8} {:>8}",
            s.algorithm,
            s.keywords,
            format!("{}/{}", s.feasible, s.queries),
            s.mean_runtime_ms,
            s.median_runtime_ms,
            s.mean_labels,
            ratio,
            fail
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> BenchConfig {
        serde_json::from_str(
            r#"{
                "graph": {"generate": {"nodes": 120, "degree": 3, "vocab": 8, "seed": 3}},
                "queries": {"count": 6, "keywords": [2, 3], "delta": 20.0, "seed": 1, "reach": 10.0},
                "algorithms": [
                    {"algo": "osscaling", "epsilon": 0.5},
                    {"algo": "bucketbound", "epsilon": 0.5, "beta": 1.2},
                    {"algo": "greedy", "width": 2},
                    {"algo": "greedy", "mode": "budget"}
                ]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn small_grid_runs_and_is_consistent() {
        let report = run_benchmark(&config()).unwrap();
        assert_eq!(report.tables, TableChoice::Dense);
        assert_eq!(report.rows.len(), 2 * 4 * 6);
        for s in &report.summary {
            if let Some(f) = s.failure_percent {
                assert!((0.0..=100.0).contains(&f));
            } else {
                assert!(!s.algorithm.starts_with("greedy"));
            }
        }
        for r in report.rows.iter().filter(|r| r.algorithm.starts_with("bucketbound")) {
            if let Some(ratio) = r.relative_ratio {
                assert!(ratio < 1.2 / (1.0 - 0.1) + 1e-9, "{ratio}");
            }
        }
        assert!(render_table(&report).contains("bucketbound"));
    }

    #[test]
    fn lazy_tables_give_identical_objectives() {
        let mut lazy = config();
        lazy.tables = TableChoice::Lazy;
        let a = run_benchmark(&config()).unwrap();
        let b = run_benchmark(&lazy).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.feasible, y.feasible, "{} q{}", x.algorithm, x.query);
            if let (Some(p), Some(q)) = (x.objective, y.objective) {
                assert!((p - q).abs() < 1e-9, "{} q{}: {p} vs {q}", x.algorithm, x.query);
            }
        }
    }

    #[test]
    fn tampered_result_is_caught() {
        let g = crate::fixtures::fixture_a();
        let q = Query::new(0, 7, ["t1", "t2"], 10.0);
        let mut r = kor_exact(&g, &q).unwrap().unwrap();
        revalidate(&g, &q, &r).unwrap();
        r.objective -= 1.0;
        assert!(matches!(revalidate(&g, &q, &r), Err(KorError::Benchmark(_))));
    }

    #[test]
    fn statistics_helpers() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(mean(&[]), 0.0);
    }
}
