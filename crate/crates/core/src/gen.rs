//! Seeded synthetic graphs and queries.
//!
//! Nodes are scattered uniformly over a square and each links, in both
//! directions, to its `degree` nearest neighbours, so the mean out-degree
//! lies between `degree` and `2·degree`. Objectives are uniform in (0,1);
//! budgets are Euclidean edge lengths by default. Keywords are `w0, w1, ...`
//! drawn with Zipf-like weights, so low-numbered keywords are common.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KorError, Result};
use crate::graph::{Edge, Graph, Node, NodeId};
use crate::index::InvertedIndex;
use crate::preprocess::{Direction, PathKind, ShortestTree};
use crate::query::Query;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BudgetModel {
    /// Euclidean length of the edge.
    Planar,
    Uniform { lo: f64, hi: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenSpec {
    pub nodes: usize,
    pub degree: usize,
    pub vocab: usize,
    pub min_keywords: usize,
    pub max_keywords: usize,
    pub zipf_exponent: f64,
    /// Side of the square; `None` picks `2.2·√nodes`, which puts the nearest
    /// neighbour at roughly one unit.
    pub extent: Option<f64>,
    pub budget: BudgetModel,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            nodes: 1000,
            degree: 3,
            vocab: 200,
            min_keywords: 1,
            max_keywords: 3,
            zipf_exponent: 1.0,
            extent: None,
            budget: BudgetModel::Planar,
            seed: 42,
        }
    }
}

impl GenSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KorError::Parameter(m));
        if self.nodes < 2 {
            return bad(format!("need at least 2 nodes, got {}", self.nodes));
        }
        if self.degree == 0 || self.degree >= self.nodes {
            return bad(format!("degree must lie in 1..{}", self.nodes));
        }
        if self.min_keywords > self.max_keywords || self.max_keywords > self.vocab {
            return bad("keywords per node must satisfy min <= max <= vocab".into());
        }
        if let Some(e) = self.extent {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("extent must be positive, got {e}"));
            }
        }
        if let BudgetModel::Uniform { lo, hi } = self.budget {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return bad(format!("uniform budget range ({lo},{hi}) is invalid"));
            }
        }
        Ok(())
    }

    pub fn extent(&self) -> f64 {
        self.extent.unwrap_or(2.2 * (self.nodes as f64).sqrt())
    }
}

/// `k` nearest neighbours of every point, using a uniform grid.
fn nearest_neighbours(points: &[(f64, f64)], extent: f64, k: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let side = ((n as f64 / 2.0).sqrt().ceil() as usize).max(1);
    let cell = extent / side as f64;
    let cell_of = |p: (f64, f64)| -> (usize, usize) {
        let cx = ((p.0 / cell) as usize).min(side - 1);
        let cy = ((p.1 / cell) as usize).min(side - 1);
        (cx, cy)
    };
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); side * side];
    for (i, &p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        grid[cy * side + cx].push(i);
    }
    let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);

    let mut out = Vec::with_capacity(n);
    for (i, &p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        let mut best: Vec<(f64, usize)> = Vec::new();
        let mut ring = 0usize;
        loop {
            let lo_x = cx.saturating_sub(ring);
            let hi_x = (cx + ring).min(side - 1);
            let lo_y = cy.saturating_sub(ring);
            let hi_y = (cy + ring).min(side - 1);
            for y in lo_y..=hi_y {
                for x in lo_x..=hi_x {
                    let on_ring = x + ring == cx || x == cx + ring || y + ring == cy || y == cy + ring;
                    if !on_ring {
                        continue;
                    }
                    for &j in &grid[y * side + x] {
                        if j != i {
                            best.push((dist(p, points[j]), j));
                        }
                    }
                }
            }
            best.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            best.truncate(k);
            // Every unvisited point is at least `ring·cell` away.
            let covered_all = ring >= side;
            if covered_all || (best.len() == k && best[k - 1].0 <= ring as f64 * cell) {
                break;
            }
            ring += 1;
        }
        out.push(best.into_iter().map(|(_, j)| j).collect());
    }
    out
}

pub fn keyword_name(rank: usize) -> String {
    format!("w{rank}")
}

/// Builds a graph from `spec`; the same spec always yields the same graph.
pub fn generate_graph(spec: &GenSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let extent = spec.extent();
    let points: Vec<(f64, f64)> = (0..spec.nodes)
        .map(|_| (rng.gen_range(0.0..extent), rng.gen_range(0.0..extent)))
        .collect();

    let weights: Vec<f64> = (0..spec.vocab)
        .map(|r| 1.0 / ((r + 1) as f64).powf(spec.zipf_exponent))
        .collect();
    let zipf = WeightedIndex::new(&weights).map_err(|e| KorError::Parameter(e.to_string()))?;
    let nodes: Vec<Node> = (0..spec.nodes)
        .map(|id| {
            let count = rng.gen_range(spec.min_keywords..=spec.max_keywords);
            let mut picked: Vec<usize> = Vec::with_capacity(count);
            while picked.len() < count {
                let r = zipf.sample(&mut rng);
                if !picked.contains(&r) {
                    picked.push(r);
                }
            }
            Node::new(id, picked.into_iter().map(keyword_name))
        })
        .collect();

    let neighbours = nearest_neighbours(&points, extent, spec.degree);
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let mut seen = HashSet::new();
    for (i, list) in neighbours.iter().enumerate() {
        for &j in list {
            for pair in [(i, j), (j, i)] {
                if seen.insert(pair) {
                    pairs.push(pair);
                }
            }
        }
    }
    let edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(a, b)| {
            let mut objective = 0.0;
            while objective == 0.0 {
                objective = rng.gen::<f64>();
            }
            let budget = match spec.budget {
                BudgetModel::Planar => {
                    let (p, q) = (points[a], points[b]);
                    (p.0 - q.0).hypot(p.1 - q.1).max(1e-9)
                }
                BudgetModel::Uniform { lo, hi } => rng.gen_range(lo..hi),
            };
            Edge::new(a, b, objective, budget)
        })
        .collect();
    Graph::new(nodes, edges)
}

fn sample_keywords(rng: &mut ChaCha8Rng, vocab: &[&str], m: usize) -> Vec<String> {
    sample(rng, vocab.len(), m)
        .into_iter()
        .map(|i| vocab[i].to_owned())
        .collect()
}

/// `count` queries with distinct random endpoints and `m` distinct keywords
/// drawn uniformly from the graph's vocabulary.
pub fn generate_queries(graph: &Graph, m: usize, budget_limit: f64, count: usize, seed: u64) -> Result<Vec<Query>> {
    let index = InvertedIndex::build(graph);
    let vocab: Vec<&str> = index.vocabulary().collect();
    if m == 0 || m > vocab.len() {
        return Err(KorError::Parameter(format!(
            "need 1..={} keywords, got {m}",
            vocab.len()
        )));
    }
    let n = graph.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n - 1);
            if t >= s {
                t += 1;
            }
            Query::new(s, t, sample_keywords(&mut rng, &vocab, m), budget_limit)
        })
        .collect())
}

/// Like [`generate_queries`], but each target is drawn from the nodes within
/// `reach` budget of the source, so that queries are not trivially out of
/// budget on large sparse graphs.
pub fn generate_local_queries(
    graph: &Graph,
    m: usize,
    budget_limit: f64,
    reach: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Query>> {
    let index = InvertedIndex::build(graph);
    let vocab: Vec<&str> = index.vocabulary().collect();
    if m == 0 || m > vocab.len() {
        return Err(KorError::Parameter(format!(
            "need 1..={} keywords, got {m}",
            vocab.len()
        )));
    }
    let n = graph.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(KorError::Parameter(format!(
                "could not find sources with targets within {reach}"
            )));
        }
        let s = rng.gen_range(0..n);
        let tree = ShortestTree::compute(graph, PathKind::Sigma, s, Direction::From, reach);
        let near: Vec<NodeId> = (0..n)
            .filter(|&v| v != s && tree.scores(v).budget <= reach)
            .collect();
        if near.is_empty() {
            continue;
        }
        let t = near[rng.gen_range(0..near.len())];
        out.push(Query::new(s, t, sample_keywords(&mut rng, &vocab, m), budget_limit));
    }
    Ok(out)
}
