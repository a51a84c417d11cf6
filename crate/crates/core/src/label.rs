//! Labels: partial routes summarized as (covered keywords, scaled objective,
//! objective, budget), plus the per-node stores that keep only
//! non-dominated ones.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{KorError, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::query::{KeywordMask, QueryTerms};

/// Objective scaling for one query.
#[derive(Clone, Debug)]
pub struct ScalingContext {
    epsilon: f64,
    theta: f64,
    l_max: u128,
    // Aligned with `Graph::out_edges`.
    scaled: Vec<Vec<u64>>,
}

/// `⌊o/θ⌋`, corrected so that `θ·ô ≤ o < θ·(ô+1)` holds in floating point.
pub fn scale_value(o: f64, theta: f64) -> u64 {
    let mut q = (o / theta).floor().max(0.0) as u64;
    while q > 0 && theta * q as f64 > o {
        q -= 1;
    }
    while theta * (q + 1) as f64 <= o {
        q += 1;
    }
    q
}

/// Upper bound on live labels per node:
/// `2^m · ⌊Δ/b_min⌋ · ⌊o_max·Δ/(ε·o_min·b_min)⌋`, saturating.
pub fn l_max(m: usize, delta: f64, epsilon: f64, o_min: f64, o_max: f64, b_min: f64) -> u128 {
    let to_int = |x: f64| -> u128 {
        if x >= u128::MAX as f64 {
            u128::MAX
        } else {
            x.floor() as u128
        }
    };
    let hops = to_int(delta / b_min);
    let levels = to_int(o_max * delta / (epsilon * o_min * b_min));
    let subsets = if m >= 128 { u128::MAX } else { 1u128 << m };
    subsets.saturating_mul(hops).saturating_mul(levels)
}

impl ScalingContext {
    pub fn new(graph: &Graph, budget_limit: f64, keyword_count: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(KorError::Parameter(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if !(budget_limit > 0.0 && budget_limit.is_finite()) {
            return Err(KorError::Parameter(format!(
                "objective scaling needs a finite positive budget limit, got {budget_limit}"
            )));
        }
        let stats = graph.stats();
        if stats.edge_count == 0 {
            // Nothing to scale; θ only has to be positive.
            return Ok(ScalingContext {
                epsilon,
                theta: epsilon,
                l_max: 1 << keyword_count.min(127),
                scaled: vec![Vec::new(); graph.node_count()],
            });
        }
        let theta = epsilon * stats.o_min * stats.b_min / budget_limit;
        let scaled = (0..graph.node_count())
            .map(|v| {
                graph
                    .out_edges(v)
                    .iter()
                    .map(|e| scale_value(e.objective, theta))
                    .collect()
            })
            .collect();
        Ok(ScalingContext {
            epsilon,
            theta,
            l_max: l_max(
                keyword_count,
                budget_limit,
                epsilon,
                stats.o_min,
                stats.o_max,
                stats.b_min,
            ),
            scaled,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn l_max(&self) -> u128 {
        self.l_max
    }

    pub fn scale(&self, o: f64) -> u64 {
        scale_value(o, self.theta)
    }

    /// Scaled objective of the `index`-th out-edge of `src`.
    pub fn scaled_edge(&self, src: NodeId, index: usize) -> u64 {
        self.scaled[src][index]
    }
}

pub type LabelId = usize;

/// How a label's node was reached from its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hop {
    Edge,
    /// A jump along the minimum-budget path, expanded when the route is built.
    Sigma,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Label {
    pub node: NodeId,
    pub mask: KeywordMask,
    pub scaled: u64,
    pub os: f64,
    pub bs: f64,
    pub parent: Option<LabelId>,
    pub hop: Hop,
    pub seq: u64,
    pub alive: bool,
}

impl Label {
    /// Field-wise domination: `λ ⊇`, `ÔS ≤`, `BS ≤`.
    pub fn dominates(&self, other: &Label) -> bool {
        self.mask.is_superset_of(other.mask) && self.scaled <= other.scaled && self.bs <= other.bs
    }

    fn same_fields(&self, other: &Label) -> bool {
        self.mask == other.mask && self.scaled == other.scaled && self.bs == other.bs
    }

    /// Domination as used by the stores: among labels with identical fields
    /// the older one wins, so the relation is antisymmetric.
    pub fn supersedes(&self, other: &Label) -> bool {
        self.dominates(other) && (!self.same_fields(other) || self.seq < other.seq)
    }

    /// Label order: more covered keywords first, then smaller `ÔS`, then
    /// smaller `BS`, then node id and creation sequence.
    pub fn order(&self, other: &Label) -> Ordering {
        other
            .mask
            .len()
            .cmp(&self.mask.len())
            .then(self.scaled.cmp(&other.scaled))
            .then(self.bs.total_cmp(&other.bs))
            .then(self.node.cmp(&other.node))
            .then(self.seq.cmp(&other.seq))
    }

    pub fn precedes(&self, other: &Label) -> bool {
        self.order(other) == Ordering::Less
    }
}

/// The first label at the source node.
pub fn initial_label(terms: &QueryTerms, source: NodeId) -> Label {
    Label {
        node: source,
        mask: terms.mask_of(source),
        scaled: 0,
        os: 0.0,
        bs: 0.0,
        parent: None,
        hop: Hop::Edge,
        seq: 0,
        alive: true,
    }
}

/// Child of `parent` (stored as `parent_id`) across `edge`, whose scaled
/// objective is `scaled`.
pub fn extend(parent: &Label, parent_id: LabelId, edge: &Edge, scaled: u64, terms: &QueryTerms) -> Label {
    debug_assert_eq!(parent.node, edge.src);
    Label {
        node: edge.dst,
        mask: parent.mask.union(terms.mask_of(edge.dst)),
        scaled: parent.scaled + scaled,
        os: parent.os + edge.objective,
        bs: parent.bs + edge.budget,
        parent: Some(parent_id),
        hop: Hop::Edge,
        seq: 0,
        alive: true,
    }
}

/// True iff at least `k` labels among `others` supersede `label`.
pub fn k_dominated<'a>(label: &Label, others: impl IntoIterator<Item = &'a Label>, k: usize) -> bool {
    others
        .into_iter()
        .filter(|o| o.alive && o.supersedes(label))
        .take(k)
        .count()
        >= k
}

/// Owns every label of one search, plus per-node lists of live ones.
#[derive(Debug)]
pub struct LabelStore {
    labels: Vec<Label>,
    live: Vec<Vec<LabelId>>,
    k: usize,
    next_seq: u64,
    max_live: usize,
}

#[derive(Debug, PartialEq, Eq)]
pub enum Admission {
    Rejected,
    /// Stored under this id; `purged` labels were killed by it.
    Admitted { id: LabelId, purged: usize },
}

impl LabelStore {
    pub fn new(node_count: usize, k: usize) -> Self {
        assert!(k >= 1);
        LabelStore {
            labels: Vec::new(),
            live: vec![Vec::new(); node_count],
            k,
            next_seq: 0,
            max_live: 0,
        }
    }

    pub fn get(&self, id: LabelId) -> &Label {
        &self.labels[id]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn live_at(&self, node: NodeId) -> impl Iterator<Item = &Label> + '_ {
        self.live[node].iter().map(|&id| &self.labels[id])
    }

    pub fn live_count(&self, node: NodeId) -> usize {
        self.live[node].len()
    }

    /// Largest number of live labels seen at any single node.
    pub fn max_live(&self) -> usize {
        self.max_live
    }

    /// Stamps `label` with a sequence number and stores it unless it is
    /// k-dominated at its node. Live labels that become k-dominated are
    /// killed.
    pub fn admit(&mut self, mut label: Label) -> Admission {
        label.seq = self.next_seq;
        self.next_seq += 1;
        let node = label.node;
        if k_dominated(&label, self.live_at(node), self.k) {
            return Admission::Rejected;
        }

        let id = self.labels.len();
        self.labels.push(label);
        let mut victims = Vec::new();
        for &other in &self.live[node] {
            let (new, old) = (&self.labels[id], &self.labels[other]);
            if new.supersedes(old) {
                if self.k == 1 {
                    victims.push(other);
                } else {
                    let count = self.live[node]
                        .iter()
                        .chain(std::iter::once(&id))
                        .filter(|&&d| d != other && self.labels[d].supersedes(old))
                        .count();
                    if count >= self.k {
                        victims.push(other);
                    }
                }
            }
        }
        for &v in &victims {
            self.labels[v].alive = false;
        }
        self.live[node].retain(|v| !victims.contains(v));
        self.live[node].push(id);
        self.max_live = self.max_live.max(self.live[node].len());
        Admission::Admitted {
            id,
            purged: victims.len(),
        }
    }

    /// Stores a label outside dominance bookkeeping (used for the root).
    pub fn insert_unchecked(&mut self, mut label: Label) -> LabelId {
        label.seq = self.next_seq;
        self.next_seq += 1;
        let id = self.labels.len();
        self.live[label.node].push(id);
        self.labels.push(label);
        self.max_live = self.max_live.max(self.live[self.labels[id].node].len());
        id
    }

    /// Node/hop chain from the root to `id`.
    pub fn chain(&self, id: LabelId) -> Vec<(NodeId, Hop)> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            let l = &self.labels[c];
            out.push((l.node, l.hop));
            cur = l.parent;
        }
        out.reverse();
        out
    }
}

/// Min-queue of label ids under the label order.
#[derive(Debug, Default)]
pub struct LabelQueue {
    heap: BinaryHeap<QueueEntry>,
}

#[derive(Debug)]
struct QueueEntry {
    count: u32,
    scaled: u64,
    bs: f64,
    node: NodeId,
    seq: u64,
    id: LabelId,
}

impl QueueEntry {
    fn new(label: &Label, id: LabelId) -> Self {
        QueueEntry {
            count: label.mask.len(),
            scaled: label.scaled,
            bs: label.bs,
            node: label.node,
            seq: label.seq,
            id,
        }
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Greatest = first in label order.
        self.count
            .cmp(&other.count)
            .then(other.scaled.cmp(&self.scaled))
            .then(other.bs.total_cmp(&self.bs))
            .then(other.node.cmp(&self.node))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl LabelQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, store: &LabelStore, id: LabelId) {
        self.heap.push(QueueEntry::new(store.get(id), id));
    }

    /// Next live label, skipping killed ones.
    pub fn pop_live(&mut self, store: &LabelStore) -> Option<LabelId> {
        while let Some(e) = self.heap.pop() {
            if store.get(e.id).alive {
                return Some(e.id);
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }
}
