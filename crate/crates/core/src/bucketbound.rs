//! Bucketed label search: labels are binned by their objective lower bound
//! on a geometric scale, and the search stops at the first feasible route
//! found in the lowest non-empty bin.

use std::collections::BTreeMap;

use crate::error::{KorError, Result};
use crate::graph::{Graph, NodeId};
use crate::index::InvertedIndex;
use crate::label::{extend, initial_label, Admission, Label, LabelId, LabelQueue, LabelStore, ScalingContext};
use crate::osscaling::strategy2_prunable;
use crate::preprocess::{PathTables, ScoreView};
use crate::query::{Query, QueryTerms};
use crate::result::{Algorithm, Params, RouteResult, SearchStats};
use crate::search::{check_k, materialize, prepare, TopK};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BucketBoundOptions {
    pub epsilon: f64,
    pub beta: f64,
    /// Drop labels that cannot reach any holder of a rare keyword within
    /// budget.
    pub strategy2: bool,
    pub rare_fraction: f64,
}

impl Default for BucketBoundOptions {
    fn default() -> Self {
        BucketBoundOptions {
            epsilon: 0.5,
            beta: 1.2,
            strategy2: true,
            rare_fraction: 0.01,
        }
    }
}

impl BucketBoundOptions {
    pub fn new(epsilon: f64, beta: f64) -> Self {
        BucketBoundOptions {
            epsilon,
            beta,
            ..Self::default()
        }
    }
}

/// `OS + OS(τ(node, t))`: no completion of the label can do better.
pub fn low_bound(label: &Label, tau_t: &ScoreView<'_>) -> f64 {
    label.os + tau_t.scores(label.node).objective
}

/// The `r` with `β^r·X ≤ low < β^(r+1)·X`. Values below `X` map to 0.
pub fn bucket_index(low: f64, x: f64, beta: f64) -> u32 {
    if !(low > x) {
        return 0;
    }
    let mut r = ((low / x).ln() / beta.ln()).floor().clamp(0.0, i32::MAX as f64 - 1.0) as i32;
    while r > 0 && beta.powi(r) * x > low {
        r -= 1;
    }
    while beta.powi(r + 1) * x <= low {
        r += 1;
    }
    r as u32
}

struct Search<'a, 't> {
    graph: &'a Graph,
    tables: &'t dyn PathTables,
    query: &'a Query,
    terms: QueryTerms,
    tau_t: ScoreView<'t>,
    sigma_t: ScoreView<'t>,
    ctx: ScalingContext,
    beta: f64,
    base: f64,
    store: LabelStore,
    buckets: BTreeMap<u32, LabelQueue>,
    top: TopK,
    k: usize,
    rare: Option<(usize, &'a [NodeId])>,
    stats: SearchStats,
}

impl Search<'_, '_> {
    fn done(&self) -> bool {
        self.top.is_full()
    }

    fn is_complete_within_budget(&self, label: &Label) -> bool {
        label.mask.is_superset_of(self.terms.full())
            && label.bs + self.tau_t.scores(label.node).budget <= self.query.budget_limit
    }

    fn found(&mut self, id: LabelId) -> Result<()> {
        let label = self.store.get(id);
        let low = low_bound(label, &self.tau_t);
        let route = materialize(
            &self.store,
            id,
            self.tables,
            &self.tau_t,
            self.query.target,
            self.query.budget_limit,
        )?;
        self.top.insert(low, route);
        Ok(())
    }

    fn process(&mut self, label: Label, current: u32) -> Result<()> {
        self.stats.labels_generated += 1;
        let delta = self.query.budget_limit;
        if !(label.bs + self.sigma_t.scores(label.node).budget <= delta) {
            self.stats.labels_pruned += 1;
            return Ok(());
        }
        if let Some((bit, holders)) = self.rare {
            if !label.mask.contains(bit)
                && strategy2_prunable(
                    &label,
                    holders,
                    self.tables,
                    &self.tau_t,
                    &self.sigma_t,
                    f64::INFINITY,
                    delta,
                )
            {
                self.stats.labels_pruned += 1;
                return Ok(());
            }
        }
        let id = match self.store.admit(label) {
            Admission::Rejected => {
                self.stats.labels_dominated += 1;
                return Ok(());
            }
            Admission::Admitted { id, purged } => {
                self.stats.labels_dominated += purged as u64;
                id
            }
        };
        let label = self.store.get(id);
        let slot = bucket_index(low_bound(label, &self.tau_t), self.base, self.beta).max(current);
        if slot == current && self.is_complete_within_budget(label) {
            self.found(id)?;
            if self.k == 1 {
                return Ok(());
            }
        }
        let bucket = self.buckets.entry(slot).or_default();
        bucket.push(&self.store, id);
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        let root = initial_label(&self.terms, self.query.source);
        self.process(root, 0)?;
        while !self.done() {
            let Some(mut entry) = self.buckets.first_entry() else {
                break;
            };
            let current = *entry.key();
            let Some(id) = entry.get_mut().pop_live(&self.store) else {
                entry.remove();
                continue;
            };
            let label = self.store.get(id).clone();
            if self.is_complete_within_budget(&label) {
                self.found(id)?;
                if self.done() {
                    break;
                }
            }
            let x = label.node;
            for (i, e) in self.graph.out_edges(x).iter().enumerate() {
                let child = extend(&label, id, e, self.ctx.scaled_edge(x, i), &self.terms);
                self.process(child, current)?;
                if self.done() {
                    break;
                }
            }
        }
        self.stats.max_live_per_node = self.store.max_live();
        Ok(())
    }
}

/// Up to `k` feasible routes in ascending objective order.
pub fn kkr_bucketbound(
    graph: &Graph,
    tables: &dyn PathTables,
    index: &InvertedIndex,
    query: &Query,
    opts: &BucketBoundOptions,
    k: usize,
) -> Result<Vec<RouteResult>> {
    check_k(k)?;
    if !(opts.beta > 1.0 && opts.beta.is_finite()) {
        return Err(KorError::Parameter(format!("beta must exceed 1, got {}", opts.beta)));
    }
    let ctx = ScalingContext::new(graph, query.budget_limit, query.keywords.len(), opts.epsilon)?;
    let Some(prep) = prepare(graph, tables, index, query)? else {
        return Ok(Vec::new());
    };
    let mut base = prep.tau_t.scores(query.source).objective;
    if base <= 0.0 {
        // Source and target coincide; any positive scale works.
        base = if graph.stats().edge_count > 0 { graph.stats().o_min } else { 1.0 };
    }
    let rare = if opts.strategy2 {
        prep.terms
            .rare_keyword(opts.rare_fraction)
            .map(|bit| (bit, index.postings(&prep.terms.terms()[bit])))
    } else {
        None
    };
    let mut search = Search {
        graph,
        tables,
        query,
        terms: prep.terms,
        tau_t: prep.tau_t,
        sigma_t: prep.sigma_t,
        ctx,
        beta: opts.beta,
        base,
        store: LabelStore::new(graph.node_count(), k),
        buckets: BTreeMap::new(),
        top: TopK::new(k),
        k,
        rare,
        stats: SearchStats::default(),
    };
    search.run()?;
    let stats = search.stats;
    let params = Params {
        epsilon: Some(opts.epsilon),
        beta: Some(opts.beta),
        opt2: Some(opts.strategy2),
        k,
        ..Params::default()
    };
    let mut out = search
        .top
        .into_routes()
        .into_iter()
        .map(|r| RouteResult::assemble(graph, query, r, Algorithm::BucketBound, params.clone(), stats.clone()))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.objective.total_cmp(&b.objective).then_with(|| a.route.cmp(&b.route)));
    Ok(out)
}

/// A route within a factor β of the scaled optimum, or `None` when no
/// feasible route exists.
pub fn kor_bucketbound(
    graph: &Graph,
    tables: &dyn PathTables,
    index: &InvertedIndex,
    query: &Query,
    opts: &BucketBoundOptions,
) -> Result<Option<RouteResult>> {
    Ok(kkr_bucketbound(graph, tables, index, query, opts, 1)?.into_iter().next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture_a;
    use crate::osscaling::{kor_osscaling, OsScalingOptions};
    use crate::preprocess::{all_pairs_best, PathKind};

    #[test]
    fn bucket_boundaries() {
        assert_eq!(bucket_index(4.0, 4.0, 1.2), 0);
        assert_eq!(bucket_index(5.0, 4.0, 1.2), 1);
        assert_eq!(bucket_index(3.0, 4.0, 1.2), 0);
        assert_eq!(bucket_index(8.0, 1.0, 2.0), 3);
        assert_eq!(bucket_index(7.999, 1.0, 2.0), 2);
    }

    #[test]
    fn low_bound_of_source_label() {
        let g = fixture_a();
        let t = all_pairs_best(&g);
        let index = InvertedIndex::build(&g);
        let q = Query::new(0, 7, ["t1"], 10.0);
        let terms = QueryTerms::new(&q, &g, &index).unwrap();
        let tau_t = t.toward(PathKind::Tau, 7);
        assert_eq!(low_bound(&initial_label(&terms, 0), &tau_t), 4.0);
        let mut at_target = initial_label(&terms, 7);
        at_target.os = 2.5;
        assert_eq!(low_bound(&at_target, &tau_t), 2.5);
    }

    #[test]
    fn two_keyword_query_within_beta() {
        let g = fixture_a();
        let t = all_pairs_best(&g);
        let index = InvertedIndex::build(&g);
        let q = Query::new(0, 7, ["t1", "t2"], 10.0);
        let os = kor_osscaling(&g, &t, &index, &q, &OsScalingOptions::default())
            .unwrap()
            .unwrap();
        let bb = kor_bucketbound(&g, &t, &index, &q, &BucketBoundOptions::default())
            .unwrap()
            .unwrap();
        assert!(bb.feasible);
        assert!(bb.objective < 1.2 * os.objective, "{} vs {}", bb.objective, os.objective);
    }

    #[test]
    fn infeasible_and_parameter_errors() {
        let g = fixture_a();
        let t = all_pairs_best(&g);
        let index = InvertedIndex::build(&g);
        let opts = BucketBoundOptions::default();
        let q = Query::new(0, 7, ["t1", "museum"], 10.0);
        assert!(kor_bucketbound(&g, &t, &index, &q, &opts).unwrap().is_none());
        let q = Query::new(0, 7, ["t1"], 10.0);
        assert!(kor_bucketbound(&g, &t, &index, &q, &BucketBoundOptions::new(0.5, 1.0)).is_err());
    }

    #[test]
    fn source_equal_target() {
        let g = fixture_a();
        let t = all_pairs_best(&g);
        let index = InvertedIndex::build(&g);
        let opts = BucketBoundOptions::default();
        let r = kor_bucketbound(&g, &t, &index, &Query::new(2, 2, ["t1"], 3.0), &opts)
            .unwrap()
            .unwrap();
        assert_eq!(r.route.nodes(), &[2]);
        // v7 -> v1 -> v4 -> v7 picks up t5 on the way round.
        let r = kor_bucketbound(&g, &t, &index, &Query::new(7, 7, ["t5"], 10.0), &opts)
            .unwrap()
            .unwrap();
        assert_eq!(r.route.nodes(), &[7, 1, 4, 7]);
    }
}
