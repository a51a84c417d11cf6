//! Exhaustive walk enumeration. Exponential; meant for checking the other
//! algorithms on small instances.

use crate::error::{KorError, Result};
use crate::graph::{Graph, NodeId, Route};
use crate::query::Query;
use crate::result::{Algorithm, Params, RouteResult, SearchStats};

/// Instance-size guards. Enumeration cost grows like `d^hops`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_hops: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 14,
            max_hops: 12,
        }
    }
}

/// Minimum objective and minimum budget from every node to `target`,
/// by Bellman-Ford over the edge list.
fn bounds_to(graph: &Graph, target: NodeId) -> (Vec<f64>, Vec<f64>) {
    let n = graph.node_count();
    let mut obj = vec![f64::INFINITY; n];
    let mut bud = vec![f64::INFINITY; n];
    obj[target] = 0.0;
    bud[target] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for e in graph.edges() {
            if obj[e.dst] + e.objective < obj[e.src] {
                obj[e.src] = obj[e.dst] + e.objective;
                changed = true;
            }
            if bud[e.dst] + e.budget < bud[e.src] {
                bud[e.src] = bud[e.dst] + e.budget;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (obj, bud)
}

struct Enumeration<'a> {
    graph: &'a Graph,
    query: &'a Query,
    masks: Vec<u32>,
    full: u32,
    obj_to_t: Vec<f64>,
    bud_to_t: Vec<f64>,
    max_hops: usize,
    k: usize,
    found: Vec<(f64, Route)>,
    walk: Vec<NodeId>,
    expanded: u64,
}

impl Enumeration<'_> {
    fn bound(&self) -> f64 {
        if self.found.len() >= self.k {
            self.found[self.k - 1].0
        } else {
            f64::INFINITY
        }
    }

    fn record(&mut self, os: f64) {
        let route = Route::new(self.walk.clone());
        let pos = self
            .found
            .partition_point(|(o, r)| o.total_cmp(&os).then_with(|| r.cmp(&route)).is_lt());
        if pos < self.k {
            self.found.insert(pos, (os, route));
            self.found.truncate(self.k);
        }
    }

    fn dfs(&mut self, node: NodeId, covered: u32, os: f64, bs: f64) {
        self.expanded += 1;
        if node == self.query.target && covered == self.full {
            self.record(os);
        }
        if self.walk.len() > self.max_hops {
            return;
        }
        for e in self.graph.out_edges(node) {
            let (nos, nbs) = (os + e.objective, bs + e.budget);
            if nbs + self.bud_to_t[e.dst] > self.query.budget_limit {
                continue;
            }
            if nos + self.obj_to_t[e.dst] > self.bound() {
                continue;
            }
            self.walk.push(e.dst);
            self.dfs(e.dst, covered | self.masks[e.dst], nos, nbs);
            self.walk.pop();
        }
    }
}

fn enumerate(graph: &Graph, query: &Query, k: usize, limits: &OracleLimits, bounded: bool) -> Result<Vec<RouteResult>> {
    query.validate(graph)?;
    if k == 0 {
        return Err(KorError::Parameter("k must be at least 1".into()));
    }
    let n = graph.node_count();
    if n > limits.max_nodes {
        return Err(KorError::OracleLimit(format!("{n} nodes exceeds {}", limits.max_nodes)));
    }
    let m = query.keywords.len();
    let b_min = graph.stats().b_min;
    let by_budget = if graph.edge_count() == 0 {
        0.0
    } else {
        (query.budget_limit / b_min).floor()
    };
    // Without a finite budget only the best route is well defined: it never
    // needs more than m+1 simple segments.
    let structural = ((m + 1) * n.saturating_sub(1)) as f64;
    let hops = if bounded { by_budget } else { by_budget.min(structural) };
    if !(hops <= limits.max_hops as f64) {
        return Err(KorError::OracleLimit(format!(
            "search depth {hops} exceeds {} hops",
            limits.max_hops
        )));
    }

    let masks: Vec<u32> = (0..n)
        .map(|v| {
            let node = graph.node(v).expect("dense ids");
            query
                .keywords
                .iter()
                .enumerate()
                .filter(|(_, kw)| node.has_keyword(kw))
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let full = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let (obj_to_t, bud_to_t) = bounds_to(graph, query.target);
    let mut en = Enumeration {
        graph,
        query,
        full,
        obj_to_t,
        bud_to_t,
        max_hops: hops as usize,
        k,
        found: Vec::new(),
        walk: vec![query.source],
        expanded: 0,
        masks,
    };
    if en.bud_to_t[query.source] <= query.budget_limit {
        let start = en.masks[query.source];
        en.dfs(query.source, start, 0.0, 0.0);
    }
    let stats = SearchStats {
        labels_generated: en.expanded,
        ..SearchStats::default()
    };
    let params = Params {
        k,
        ..Params::default()
    };
    en.found
        .into_iter()
        .map(|(_, r)| RouteResult::assemble(graph, query, r, Algorithm::Oracle, params.clone(), stats.clone()))
        .collect()
}

/// The exact optimum over all walks, ties broken by the lexicographically
/// smallest node sequence.
pub fn kor_exact(graph: &Graph, query: &Query) -> Result<Option<RouteResult>> {
    kor_exact_with(graph, query, &OracleLimits::default())
}

pub fn kor_exact_with(graph: &Graph, query: &Query, limits: &OracleLimits) -> Result<Option<RouteResult>> {
    Ok(enumerate(graph, query, 1, limits, false)?.into_iter().next())
}

/// The `k` cheapest distinct feasible walks. Needs a finite budget limit.
pub fn kkr_exact(graph: &Graph, query: &Query, k: usize) -> Result<Vec<RouteResult>> {
    kkr_exact_with(graph, query, k, &OracleLimits::default())
}

pub fn kkr_exact_with(graph: &Graph, query: &Query, k: usize, limits: &OracleLimits) -> Result<Vec<RouteResult>> {
    enumerate(graph, query, k, limits, true)
}

pub fn feasible_exists(graph: &Graph, query: &Query) -> Result<bool> {
    Ok(kor_exact(graph, query)?.is_some())
}
