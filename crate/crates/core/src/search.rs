//! Pieces shared by the label-setting searches.

use crate::error::{KorError, Result};
use crate::graph::{Graph, NodeId, Route};
use crate::index::InvertedIndex;
use crate::label::{Hop, LabelId, LabelStore};
use crate::preprocess::{PathKind, PathTables, ScoreView};
use crate::query::{Query, QueryTerms};

pub(crate) struct Prepared<'t> {
    pub terms: QueryTerms,
    pub tau_t: ScoreView<'t>,
    pub sigma_t: ScoreView<'t>,
}

/// Validates the query and loads target-side scores. `None` means no
/// feasible route can exist: a keyword is carried by no node, or the target
/// is out of budget reach.
pub(crate) fn prepare<'t>(
    graph: &Graph,
    tables: &'t dyn PathTables,
    index: &InvertedIndex,
    query: &Query,
) -> Result<Option<Prepared<'t>>> {
    query.validate(graph)?;
    if tables.node_count() != graph.node_count() {
        return Err(KorError::TableMismatch(format!(
            "tables cover {} nodes, graph has {}",
            tables.node_count(),
            graph.node_count()
        )));
    }
    let terms = QueryTerms::new(query, graph, index)?;
    if terms.has_orphan_keyword() {
        return Ok(None);
    }
    let sigma_t = tables.toward(PathKind::Sigma, query.target);
    if !(sigma_t.scores(query.source).budget <= query.budget_limit) {
        return Ok(None);
    }
    let tau_t = tables.toward(PathKind::Tau, query.target);
    Ok(Some(Prepared {
        terms,
        tau_t,
        sigma_t,
    }))
}

/// The walk encoded by a label chain, followed by the τ path to the target.
pub(crate) fn materialize(
    store: &LabelStore,
    id: LabelId,
    tables: &dyn PathTables,
    tau_t: &ScoreView<'_>,
    target: NodeId,
    budget_limit: f64,
) -> Result<Route> {
    let chain = store.chain(id);
    let mut route = Route::single(chain[0].0);
    let mut prev = chain[0].0;
    for &(node, hop) in &chain[1..] {
        match hop {
            Hop::Edge => route.concat(&Route::new(vec![prev, node])),
            Hop::Sigma => {
                let hop_path = tables
                    .from(PathKind::Sigma, prev, budget_limit)
                    .path(node)
                    .ok_or(KorError::NoPath { from: prev, to: node })?;
                route.concat(&hop_path);
            }
        }
        prev = node;
    }
    let tail = tau_t
        .path(prev)
        .ok_or(KorError::NoPath { from: prev, to: target })?;
    route.concat(&tail);
    Ok(route)
}

/// The `k` cheapest distinct routes seen so far.
#[derive(Debug)]
pub(crate) struct TopK {
    k: usize,
    items: Vec<(f64, Route)>,
}

impl TopK {
    pub fn new(k: usize) -> Self {
        TopK {
            k,
            items: Vec::new(),
        }
    }

    /// Adds a route; returns false if it was already present or not among
    /// the best `k`.
    pub fn insert(&mut self, objective: f64, route: Route) -> bool {
        if self.items.iter().any(|(_, r)| *r == route) {
            return false;
        }
        let pos = self
            .items
            .partition_point(|(o, r)| o.total_cmp(&objective).then_with(|| r.cmp(&route)).is_lt());
        if pos >= self.k {
            return false;
        }
        self.items.insert(pos, (objective, route));
        self.items.truncate(self.k);
        true
    }

    pub fn is_full(&self) -> bool {
        self.items.len() >= self.k
    }

    /// Objective of the k-th best route, or infinity while fewer are known.
    pub fn bound(&self) -> f64 {
        if self.is_full() {
            self.items[self.k - 1].0
        } else {
            f64::INFINITY
        }
    }

    pub fn into_routes(self) -> Vec<Route> {
        self.items.into_iter().map(|(_, r)| r).collect()
    }
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(KorError::Parameter("k must be at least 1".into()));
    }
    Ok(())
}
