//! Best-objective (τ) and best-budget (σ) path scores between node pairs.
//!
//! [`PreprocessTables`] holds dense all-pairs matrices. [`LazyTables`]
//! answers the same questions with single-source searches computed on demand,
//! for graphs too large for quadratic storage. Search code talks to both
//! through [`PathTables`].

mod dense;
mod lazy;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::{NodeId, Route, Scores};

pub use dense::{all_pairs_best, PreprocessTables, PRE_MAGIC};
pub use lazy::{LazyTables, ShortestTree};

/// Which path family a score refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Minimum objective score; budget of that same path.
    Tau,
    /// Minimum budget score; objective of that same path.
    Sigma,
}

impl PathKind {
    /// Orders `(objective, budget)` pairs by the optimized field first.
    pub(crate) fn key(self, s: Scores) -> (f64, f64) {
        match self {
            PathKind::Tau => (s.objective, s.budget),
            PathKind::Sigma => (s.budget, s.objective),
        }
    }

    pub(crate) fn from_key(self, primary: f64, secondary: f64) -> Scores {
        match self {
            PathKind::Tau => Scores {
                objective: primary,
                budget: secondary,
            },
            PathKind::Sigma => Scores {
                objective: secondary,
                budget: primary,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Paths from the anchor to every node.
    From,
    /// Paths from every node to the anchor.
    Toward,
}

/// Shortest-path scores between one anchor node and every other node.
#[derive(Clone, Debug)]
pub enum ScoreView<'a> {
    Dense {
        tables: &'a PreprocessTables,
        kind: PathKind,
        anchor: NodeId,
        direction: Direction,
    },
    Tree(Arc<ShortestTree>),
}

impl ScoreView<'_> {
    fn pair(&self, node: NodeId) -> (NodeId, NodeId) {
        match self {
            ScoreView::Dense {
                anchor, direction, ..
            } => match direction {
                Direction::From => (*anchor, node),
                Direction::Toward => (node, *anchor),
            },
            ScoreView::Tree(t) => match t.direction() {
                Direction::From => (t.anchor(), node),
                Direction::Toward => (node, t.anchor()),
            },
        }
    }

    /// Scores of the path between the anchor and `node`, oriented by the
    /// view's direction. Unreachable pairs are [`Scores::UNREACHABLE`].
    pub fn scores(&self, node: NodeId) -> Scores {
        match self {
            ScoreView::Dense { tables, kind, .. } => {
                let (i, j) = self.pair(node);
                tables.scores(*kind, i, j)
            }
            ScoreView::Tree(t) => t.scores(node),
        }
    }

    pub fn path(&self, node: NodeId) -> Option<Route> {
        match self {
            ScoreView::Dense { tables, kind, .. } => {
                let (i, j) = self.pair(node);
                tables.reconstruct_path(*kind, i, j).ok()
            }
            ScoreView::Tree(t) => t.path(node),
        }
    }
}

/// Source of τ/σ scores and paths for the search algorithms.
pub trait PathTables: Send + Sync {
    fn node_count(&self) -> usize;

    /// Paths from every node to `target`.
    fn toward(&self, kind: PathKind, target: NodeId) -> ScoreView<'_>;

    /// Paths from `source` to every node. Implementations may report nodes
    /// whose optimized score exceeds `limit` as unreachable.
    fn from(&self, kind: PathKind, source: NodeId, limit: f64) -> ScoreView<'_>;
}
