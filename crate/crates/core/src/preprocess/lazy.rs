use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use super::{Direction, PathKind, PathTables, ScoreView};
use crate::graph::{Graph, NodeId, Route, Scores};

const NO_LINK: u32 = u32::MAX;

/// Budget for cached trees, in bytes.
const CACHE_BYTES: usize = 256 << 20;

/// One single-source (or single-target) lexicographic shortest-path tree.
#[derive(Clone, Debug)]
pub struct ShortestTree {
    anchor: NodeId,
    direction: Direction,
    kind: PathKind,
    limit: f64,
    primary: Vec<f64>,
    secondary: Vec<f64>,
    // Predecessor for `From` trees, successor for `Toward` trees.
    link: Vec<u32>,
}

#[derive(PartialEq)]
struct Entry {
    key: (f64, f64),
    node: NodeId,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other
            .key
            .0
            .total_cmp(&self.key.0)
            .then(other.key.1.total_cmp(&self.key.1))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl ShortestTree {
    /// Dijkstra over `(optimized, other)` pairs, stopping once the optimized
    /// score passes `limit`.
    pub fn compute(
        graph: &Graph,
        kind: PathKind,
        anchor: NodeId,
        direction: Direction,
        limit: f64,
    ) -> Self {
        let n = graph.node_count();
        let mut primary = vec![f64::INFINITY; n];
        let mut secondary = vec![f64::INFINITY; n];
        let mut link = vec![NO_LINK; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        primary[anchor] = 0.0;
        secondary[anchor] = 0.0;
        heap.push(Entry {
            key: (0.0, 0.0),
            node: anchor,
        });
        while let Some(Entry { key, node }) = heap.pop() {
            if done[node] || key != (primary[node], secondary[node]) {
                continue;
            }
            if key.0 > limit {
                break;
            }
            done[node] = true;
            let edges = match direction {
                Direction::From => graph.out_edges(node),
                Direction::Toward => graph.in_edges(node),
            };
            for e in edges {
                let next = match direction {
                    Direction::From => e.dst,
                    Direction::Toward => e.src,
                };
                if done[next] {
                    continue;
                }
                let (p, s) = kind.key(Scores {
                    objective: e.objective,
                    budget: e.budget,
                });
                let cand = (key.0 + p, key.1 + s);
                if cand.0 < primary[next] || (cand.0 == primary[next] && cand.1 < secondary[next]) {
                    primary[next] = cand.0;
                    secondary[next] = cand.1;
                    link[next] = node as u32;
                    heap.push(Entry {
                        key: cand,
                        node: next,
                    });
                }
            }
        }
        for v in 0..n {
            if !done[v] {
                primary[v] = f64::INFINITY;
                secondary[v] = f64::INFINITY;
                link[v] = NO_LINK;
            }
        }
        ShortestTree {
            anchor,
            direction,
            kind,
            limit,
            primary,
            secondary,
            link,
        }
    }

    pub fn anchor(&self) -> NodeId {
        self.anchor
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn scores(&self, node: NodeId) -> Scores {
        self.kind.from_key(self.primary[node], self.secondary[node])
    }

    pub fn path(&self, node: NodeId) -> Option<Route> {
        if self.primary[node].is_infinite() {
            return None;
        }
        let mut nodes = vec![node];
        let mut cur = node;
        while cur != self.anchor {
            cur = self.link[cur] as usize;
            nodes.push(cur);
        }
        if self.direction == Direction::From {
            nodes.reverse();
        }
        Some(Route::new(nodes))
    }
}

type TreeKey = (PathKind, Direction, NodeId);

/// τ/σ scores computed per anchor on first use and cached.
pub struct LazyTables<'g> {
    graph: &'g Graph,
    cache: Mutex<HashMap<TreeKey, Arc<ShortestTree>>>,
    capacity: usize,
}

impl<'g> LazyTables<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let per_tree = 20 * graph.node_count().max(1);
        LazyTables {
            graph,
            cache: Mutex::new(HashMap::new()),
            capacity: (CACHE_BYTES / per_tree).max(16),
        }
    }

    pub fn clear(&self) {
        self.cache.lock().unwrap().clear();
    }

    fn tree(&self, kind: PathKind, anchor: NodeId, direction: Direction, limit: f64) -> Arc<ShortestTree> {
        let key = (kind, direction, anchor);
        if let Some(t) = self.cache.lock().unwrap().get(&key) {
            if t.limit >= limit {
                return Arc::clone(t);
            }
        }
        let tree = Arc::new(ShortestTree::compute(self.graph, kind, anchor, direction, limit));
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= self.capacity {
            cache.clear();
        }
        cache.insert(key, Arc::clone(&tree));
        tree
    }
}

impl PathTables for LazyTables<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn toward(&self, kind: PathKind, target: NodeId) -> ScoreView<'_> {
        ScoreView::Tree(self.tree(kind, target, Direction::Toward, f64::INFINITY))
    }

    fn from(&self, kind: PathKind, source: NodeId, limit: f64) -> ScoreView<'_> {
        ScoreView::Tree(self.tree(kind, source, Direction::From, limit))
    }
}
