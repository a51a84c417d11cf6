//! Greedy route construction: repeatedly walk to the node that best trades
//! objective against budget among those carrying a missing keyword.

use crate::error::{KorError, Result};
use crate::graph::{Graph, NodeId, Route, Scores};
use crate::index::InvertedIndex;
use crate::preprocess::{PathKind, PathTables, ScoreView};
use crate::query::{KeywordMask, Query, QueryTerms};
use crate::result::{Algorithm, GreedyMode, Params, RouteResult, SearchStats};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreedyOptions {
    /// Weight of the objective term; `1 - alpha` weighs the budget term.
    pub alpha: f64,
    /// 1 follows the best candidate; 2 branches on the best two.
    pub width: u8,
    pub mode: GreedyMode,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            alpha: 0.5,
            width: 1,
            mode: GreedyMode::Keyword,
        }
    }
}

/// `α·(OS + OS(τ(cur,v)) + OS(τ(v,t))) + (1−α)·(BS + BS(τ(cur,v)) + BS(τ(v,t)))`,
/// infinite when either path is missing.
pub fn node_score(partial: Scores, to_candidate: Scores, to_target: Scores, alpha: f64) -> f64 {
    if !to_candidate.is_reachable() || !to_target.is_reachable() {
        return f64::INFINITY;
    }
    let os = partial.objective + to_candidate.objective + to_target.objective;
    let bs = partial.budget + to_candidate.budget + to_target.budget;
    alpha * os + (1.0 - alpha) * bs
}

#[derive(Clone, Debug)]
struct Partial {
    route: Route,
    scores: Scores,
    uncovered: KeywordMask,
}

struct Leaf {
    route: Route,
    scores: Scores,
    feasible: bool,
}

impl Leaf {
    fn key(&self) -> (bool, f64, f64) {
        (!self.feasible, self.scores.objective, self.scores.budget)
    }

    /// Feasible first, then smaller objective, then smaller budget.
    fn beats(&self, other: &Leaf) -> bool {
        self.key().partial_cmp(&other.key()) == Some(std::cmp::Ordering::Less)
    }
}

struct Greedy<'a, 't> {
    tables: &'t dyn PathTables,
    index: &'a InvertedIndex,
    query: &'a Query,
    terms: QueryTerms,
    opts: GreedyOptions,
    tau_t: ScoreView<'t>,
    sigma_t: ScoreView<'t>,
    best: Option<Leaf>,
    expansions: u64,
}

impl Greedy<'_, '_> {
    fn strip(&self, mut uncovered: KeywordMask, route: &Route) -> KeywordMask {
        for &v in route.nodes() {
            uncovered = uncovered.difference(self.terms.mask_of(v));
        }
        uncovered
    }

    /// Candidates ordered by score, then node id.
    fn candidates(&self, p: &Partial, cur: NodeId) -> (ScoreView<'_>, Vec<(f64, NodeId)>) {
        let from = self.tables.from(PathKind::Tau, cur, f64::INFINITY);
        let mut nodes: Vec<NodeId> = (0..self.terms.len())
            .filter(|&b| p.uncovered.contains(b))
            .flat_map(|b| self.index.postings(&self.terms.terms()[b]).iter().copied())
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        let mut scored: Vec<(f64, NodeId)> = nodes
            .into_iter()
            .map(|v| {
                let s = node_score(p.scores, from.scores(v), self.tau_t.scores(v), self.opts.alpha);
                (s, v)
            })
            .filter(|(s, _)| s.is_finite())
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        (from, scored)
    }

    fn finish(&mut self, p: &Partial) {
        let cur = p.route.target().expect("partial routes are non-empty");
        let tail_view = match self.opts.mode {
            GreedyMode::Keyword => &self.tau_t,
            GreedyMode::Budget => &self.sigma_t,
        };
        let Some(tail) = tail_view.path(cur) else {
            return;
        };
        let t = tail_view.scores(cur);
        let scores = Scores {
            objective: p.scores.objective + t.objective,
            budget: p.scores.budget + t.budget,
        };
        if self.opts.mode == GreedyMode::Budget && scores.budget > self.query.budget_limit {
            return;
        }
        let covered = self.strip(p.uncovered, &tail).is_empty();
        let mut route = p.route.clone();
        route.concat(&tail);
        let leaf = Leaf {
            route,
            scores,
            feasible: covered && scores.budget <= self.query.budget_limit,
        };
        if self.best.as_ref().is_none_or(|b| leaf.beats(b)) {
            self.best = Some(leaf);
        }
    }

    fn explore(&mut self, p: Partial) {
        self.expansions += 1;
        if p.uncovered.is_empty() {
            self.finish(&p);
            return;
        }
        let cur = p.route.target().expect("partial routes are non-empty");
        let (from, cands) = self.candidates(&p, cur);
        if cands.is_empty() {
            // Only reachable in budget mode after the first hop: stop and
            // head for the target.
            if self.opts.mode == GreedyMode::Budget && p.route.hops() > 0 {
                self.finish(&p);
            }
            return;
        }
        let children: Vec<(NodeId, Scores, Option<Route>)> = cands
            .iter()
            .take(self.opts.width as usize)
            .map(|&(_, v)| (v, from.scores(v), from.path(v)))
            .collect();
        drop(from);
        for (v, hop, path) in children {
            if self.opts.mode == GreedyMode::Budget
                && p.scores.budget + hop.budget + self.sigma_t.scores(v).budget > self.query.budget_limit
            {
                self.finish(&p);
                continue;
            }
            let Some(path) = path else { continue };
            let mut route = p.route.clone();
            route.concat(&path);
            let child = Partial {
                uncovered: self.strip(p.uncovered, &path),
                route,
                scores: Scores {
                    objective: p.scores.objective + hop.objective,
                    budget: p.scores.budget + hop.budget,
                },
            };
            self.explore(child);
        }
    }
}

/// Greedy route for the query. `None` means the construction failed: no
/// candidate carried a missing keyword, or the chosen completion does not
/// exist. A returned route may still be infeasible; check `feasible`.
pub fn kor_greedy(
    graph: &Graph,
    tables: &dyn PathTables,
    index: &InvertedIndex,
    query: &Query,
    opts: &GreedyOptions,
) -> Result<Option<RouteResult>> {
    query.validate(graph)?;
    if !(0.0..=1.0).contains(&opts.alpha) {
        return Err(KorError::Parameter(format!("alpha must lie in [0,1], got {}", opts.alpha)));
    }
    if !matches!(opts.width, 1 | 2) {
        return Err(KorError::Parameter(format!("width must be 1 or 2, got {}", opts.width)));
    }
    if tables.node_count() != graph.node_count() {
        return Err(KorError::TableMismatch("table size differs from graph".into()));
    }
    let terms = QueryTerms::new(query, graph, index)?;
    let mut g = Greedy {
        tables,
        index,
        query,
        opts: *opts,
        tau_t: tables.toward(PathKind::Tau, query.target),
        sigma_t: tables.toward(PathKind::Sigma, query.target),
        best: None,
        expansions: 0,
        terms,
    };
    let start = Partial {
        route: Route::single(query.source),
        scores: Scores::ZERO,
        uncovered: g.terms.full().difference(g.terms.mask_of(query.source)),
    };
    g.explore(start);
    let stats = SearchStats {
        labels_generated: g.expansions,
        ..SearchStats::default()
    };
    let params = Params {
        alpha: Some(opts.alpha),
        width: Some(opts.width),
        mode: Some(opts.mode),
        k: 1,
        ..Params::default()
    };
    g.best
        .map(|leaf| RouteResult::assemble(graph, query, leaf.route, Algorithm::Greedy, params, stats))
        .transpose()
}
