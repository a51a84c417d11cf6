//! Label-setting search over scaled objectives, with an objective upper
//! bound and two pruning strategies.

use crate::error::{KorError, Result};
use crate::graph::{Graph, NodeId};
use crate::index::InvertedIndex;
use crate::label::{extend, initial_label, Admission, Hop, Label, LabelId, LabelQueue, LabelStore, ScalingContext};
use crate::preprocess::{PathKind, PathTables, ScoreView};
use crate::query::{Query, QueryTerms};
use crate::result::{Algorithm, Params, RouteResult, SearchStats};
use crate::search::{check_k, materialize, prepare, TopK};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OsScalingOptions {
    pub epsilon: f64,
    /// Jump ahead to the nearest node carrying a missing keyword.
    pub strategy1: bool,
    /// Drop labels that cannot reach any holder of a rare keyword.
    pub strategy2: bool,
    /// A keyword is rare when fewer than this fraction of nodes carry it.
    pub rare_fraction: f64,
}

impl Default for OsScalingOptions {
    fn default() -> Self {
        OsScalingOptions {
            epsilon: 0.5,
            strategy1: true,
            strategy2: true,
            rare_fraction: 0.01,
        }
    }
}

impl OsScalingOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        OsScalingOptions {
            epsilon,
            ..Self::default()
        }
    }

    fn params(&self, k: usize) -> Params {
        Params {
            epsilon: Some(self.epsilon),
            opt1: Some(self.strategy1),
            opt2: Some(self.strategy2),
            k,
            ..Params::default()
        }
    }
}

/// Virtual label at the budget-nearest node carrying a keyword `label` lacks,
/// reached along the minimum-budget path. Ties go to the smaller objective,
/// then the smaller node id.
#[allow(clippy::too_many_arguments)]
pub fn strategy1_virtual_extend(
    label: &Label,
    id: LabelId,
    terms: &QueryTerms,
    index: &InvertedIndex,
    tables: &dyn PathTables,
    sigma_t: &ScoreView<'_>,
    ctx: &ScalingContext,
    budget_limit: f64,
) -> Option<Label> {
    let missing = terms.full().difference(label.mask);
    if missing.is_empty() {
        return None;
    }
    let from = tables.from(PathKind::Sigma, label.node, budget_limit);
    let mut best: Option<(f64, f64, NodeId)> = None;
    for bit in (0..terms.len()).filter(|&b| missing.contains(b)) {
        for &v in index.postings(&terms.terms()[bit]) {
            let hop = from.scores(v);
            if !(label.bs + hop.budget + sigma_t.scores(v).budget <= budget_limit) {
                continue;
            }
            let key = (hop.budget, hop.objective, v);
            let better = match best {
                None => true,
                Some(b) => key.0.total_cmp(&b.0).then(key.1.total_cmp(&b.1)).then(key.2.cmp(&b.2)).is_lt(),
            };
            if better {
                best = Some(key);
            }
        }
    }
    let (bs, os, v) = best?;
    Some(Label {
        node: v,
        mask: label.mask.union(terms.mask_of(v)),
        scaled: label.scaled + ctx.scale(os),
        os: label.os + os,
        bs: label.bs + bs,
        parent: Some(id),
        hop: Hop::Sigma,
        seq: 0,
        alive: true,
    })
}

/// True iff no holder `l` of the rare keyword allows both
/// `OS + τ(x,l) + τ(l,t) ≤ U` and `BS + σ(x,l) + σ(l,t) ≤ Δ`.
#[allow(clippy::too_many_arguments)]
pub fn strategy2_prunable(
    label: &Label,
    holders: &[NodeId],
    tables: &dyn PathTables,
    tau_t: &ScoreView<'_>,
    sigma_t: &ScoreView<'_>,
    upper: f64,
    budget_limit: f64,
) -> bool {
    let sigma = tables.from(PathKind::Sigma, label.node, budget_limit);
    let viable: Vec<NodeId> = holders
        .iter()
        .copied()
        .filter(|&l| label.bs + sigma.scores(l).budget + sigma_t.scores(l).budget <= budget_limit)
        .collect();
    if viable.is_empty() {
        return true;
    }
    if upper.is_infinite() {
        return false;
    }
    let tau = tables.from(PathKind::Tau, label.node, upper);
    viable
        .iter()
        .all(|&l| label.os + tau.scores(l).objective + tau_t.scores(l).objective > upper)
}

struct Search<'a, 't> {
    graph: &'a Graph,
    tables: &'t dyn PathTables,
    index: &'a InvertedIndex,
    query: &'a Query,
    opts: OsScalingOptions,
    terms: QueryTerms,
    tau_t: ScoreView<'t>,
    sigma_t: ScoreView<'t>,
    ctx: ScalingContext,
    store: LabelStore,
    queue: LabelQueue,
    top: TopK,
    k: usize,
    rare: Option<(usize, &'a [NodeId])>,
    stats: SearchStats,
}

impl Search<'_, '_> {
    fn upper(&self) -> f64 {
        self.top.bound()
    }

    fn process(&mut self, label: Label) -> Result<()> {
        self.stats.labels_generated += 1;
        let x = label.node;
        let delta = self.query.budget_limit;
        if !(label.bs + self.sigma_t.scores(x).budget <= delta) {
            self.stats.labels_pruned += 1;
            return Ok(());
        }
        let low = label.os + self.tau_t.scores(x).objective;
        if !(low < self.upper()) {
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
                    self.upper(),
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
        if label.mask.is_superset_of(self.terms.full()) && label.bs + self.tau_t.scores(x).budget <= delta {
            let route = materialize(
                &self.store,
                id,
                self.tables,
                &self.tau_t,
                self.query.target,
                delta,
            )?;
            let before = self.upper();
            self.top.insert(low, route);
            let after = self.upper();
            if after < before {
                self.stats.upper_bounds.push(after);
            }
            if self.k == 1 {
                return Ok(());
            }
        }
        self.queue.push(&self.store, id);
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        let root = initial_label(&self.terms, self.query.source);
        self.process(root)?;
        while let Some(id) = self.queue.pop_live(&self.store) {
            let label = self.store.get(id).clone();
            let x = label.node;
            if label.os + self.tau_t.scores(x).objective >= self.upper() {
                continue;
            }
            if self.opts.strategy1 {
                if let Some(virt) = strategy1_virtual_extend(
                    &label,
                    id,
                    &self.terms,
                    self.index,
                    self.tables,
                    &self.sigma_t,
                    &self.ctx,
                    self.query.budget_limit,
                ) {
                    self.process(virt)?;
                }
            }
            for (i, e) in self.graph.out_edges(x).iter().enumerate() {
                let child = extend(&label, id, e, self.ctx.scaled_edge(x, i), &self.terms);
                self.process(child)?;
            }
        }
        self.stats.max_live_per_node = self.store.max_live();
        Ok(())
    }
}

/// Up to `k` feasible routes in ascending objective order.
pub fn kkr_osscaling(
    graph: &Graph,
    tables: &dyn PathTables,
    index: &InvertedIndex,
    query: &Query,
    opts: &OsScalingOptions,
    k: usize,
) -> Result<Vec<RouteResult>> {
    check_k(k)?;
    if !(opts.rare_fraction >= 0.0) {
        return Err(KorError::Parameter("rare fraction must be non-negative".into()));
    }
    let ctx = ScalingContext::new(graph, query.budget_limit, query.keywords.len(), opts.epsilon)?;
    let Some(prep) = prepare(graph, tables, index, query)? else {
        return Ok(Vec::new());
    };
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
        index,
        query,
        opts: *opts,
        terms: prep.terms,
        tau_t: prep.tau_t,
        sigma_t: prep.sigma_t,
        ctx,
        store: LabelStore::new(graph.node_count(), k),
        queue: LabelQueue::new(),
        top: TopK::new(k),
        k,
        rare,
        stats: SearchStats::default(),
    };
    search.run()?;
    let stats = search.stats;
    let params = opts.params(k);
    let mut out = search
        .top
        .into_routes()
        .into_iter()
        .map(|r| RouteResult::assemble(graph, query, r, Algorithm::OsScaling, params.clone(), stats.clone()))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.objective.total_cmp(&b.objective).then_with(|| a.route.cmp(&b.route)));
    Ok(out)
}

/// The best route found, or `None` when no feasible route exists.
pub fn kor_osscaling(
    graph: &Graph,
    tables: &dyn PathTables,
    index: &InvertedIndex,
    query: &Query,
    opts: &OsScalingOptions,
) -> Result<Option<RouteResult>> {
    Ok(kkr_osscaling(graph, tables, index, query, opts, 1)?.into_iter().next())
}
