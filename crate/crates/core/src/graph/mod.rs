//! Attributed directed graphs, routes and route scores.
//!
//! Every node carries a (possibly empty) set of keyword tokens and every edge
//! carries two strictly positive attributes: an objective value, summed into a
//! route's objective score, and a budget value, summed into its budget score.

mod io;
mod popularity;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KorError, Result};

pub use io::{load_graph, read_graph_file, write_graph, write_graph_file, GRAPH_HEADER};
pub use popularity::{build_from_trajectories, TripCount, MAX_EDGE_PROBABILITY};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Sorted, duplicate-free keyword tokens.
    pub keywords: Vec<String>,
}

impl Node {
    pub fn new<I, S>(id: NodeId, keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = keywords.into_iter().map(Into::into).collect();
        Node {
            id,
            keywords: set.into_iter().collect(),
        }
    }

    pub fn has_keyword(&self, keyword: &str) -> bool {
        self.keywords
            .binary_search_by(|k| k.as_str().cmp(keyword))
            .is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub objective: f64,
    pub budget: f64,
}

impl Edge {
    pub fn new(src: NodeId, dst: NodeId, objective: f64, budget: f64) -> Self {
        Edge {
            src,
            dst,
            objective,
            budget,
        }
    }
}

/// An (objective, budget) score pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub objective: f64,
    pub budget: f64,
}

impl Scores {
    pub const ZERO: Scores = Scores {
        objective: 0.0,
        budget: 0.0,
    };
    pub const UNREACHABLE: Scores = Scores {
        objective: f64::INFINITY,
        budget: f64::INFINITY,
    };

    pub fn is_reachable(&self) -> bool {
        self.objective.is_finite() && self.budget.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub o_min: f64,
    pub o_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub max_outdegree: usize,
    pub edge_count: usize,
}

impl GraphStats {
    fn from_adjacency(out: &[Vec<Edge>]) -> Self {
        let mut stats = GraphStats {
            o_min: f64::INFINITY,
            o_max: f64::NEG_INFINITY,
            b_min: f64::INFINITY,
            b_max: f64::NEG_INFINITY,
            max_outdegree: 0,
            edge_count: 0,
        };
        for edges in out {
            stats.max_outdegree = stats.max_outdegree.max(edges.len());
            stats.edge_count += edges.len();
            for e in edges {
                stats.o_min = stats.o_min.min(e.objective);
                stats.o_max = stats.o_max.max(e.objective);
                stats.b_min = stats.b_min.min(e.budget);
                stats.b_max = stats.b_max.max(e.budget);
            }
        }
        stats
    }
}

/// One broken graph invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NodeIdMismatch { position: usize, id: NodeId },
    InvalidKeyword { node: NodeId, keyword: String },
    UnknownEndpoint { src: NodeId, dst: NodeId },
    SelfLoop { node: NodeId },
    DuplicateEdge { src: NodeId, dst: NodeId },
    NonPositiveObjective { src: NodeId, dst: NodeId, value: f64 },
    NonPositiveBudget { src: NodeId, dst: NodeId, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NodeIdMismatch { position, id } => {
                write!(f, "node at position {position} has id {id}")
            }
            Violation::InvalidKeyword { node, keyword } => {
                write!(f, "node {node} has invalid keyword {keyword:?}")
            }
            Violation::UnknownEndpoint { src, dst } => {
                write!(f, "edge ({src},{dst}) references an unknown node")
            }
            Violation::SelfLoop { node } => write!(f, "self-loop on node {node}"),
            Violation::DuplicateEdge { src, dst } => write!(f, "duplicate edge ({src},{dst})"),
            Violation::NonPositiveObjective { src, dst, value } => {
                write!(f, "edge ({src},{dst}) has objective {value}, expected > 0")
            }
            Violation::NonPositiveBudget { src, dst, value } => {
                write!(f, "edge ({src},{dst}) has budget {value}, expected > 0")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Keyword tokens are non-empty, contain no whitespace or commas, and are
/// never the lone `-` used by the file format for an empty set.
pub fn is_valid_keyword(token: &str) -> bool {
    !token.is_empty() && token != "-" && !token.chars().any(|c| c.is_whitespace() || c == ',')
}

#[derive(Clone, Debug)]
pub struct Graph {
    nodes: Vec<Node>,
    out: Vec<Vec<Edge>>,
    inc: Vec<Vec<Edge>>,
    stray: Vec<Edge>,
    stats: GraphStats,
}

impl Graph {
    /// Builds a graph and rejects it unless every invariant holds.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let graph = Self::from_parts_unchecked(nodes, edges);
        let report = graph.validate();
        if let Some(first) = report.violations.first() {
            let extra = report.violations.len() - 1;
            let msg = if extra > 0 {
                format!("{first} (and {extra} more)")
            } else {
                first.to_string()
            };
            return Err(KorError::Constraint(msg));
        }
        Ok(graph)
    }

    /// Builds a graph without checking invariants; see [`Graph::validate`].
    pub fn from_parts_unchecked(nodes: Vec<Node>, edges: Vec<Edge>) -> Self {
        let n = nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut stray = Vec::new();
        for e in edges {
            if e.src < n && e.dst < n {
                out[e.src].push(e);
                inc[e.dst].push(e);
            } else {
                stray.push(e);
            }
        }
        for list in out.iter_mut() {
            list.sort_by_key(|e| e.dst);
        }
        for list in inc.iter_mut() {
            list.sort_by_key(|e| e.src);
        }
        let stats = GraphStats::from_adjacency(&out);
        Graph {
            nodes,
            out,
            inc,
            stray,
            stats,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (position, node) in self.nodes.iter().enumerate() {
            if node.id != position {
                violations.push(Violation::NodeIdMismatch {
                    position,
                    id: node.id,
                });
            }
            for kw in &node.keywords {
                if !is_valid_keyword(kw) {
                    violations.push(Violation::InvalidKeyword {
                        node: node.id,
                        keyword: kw.clone(),
                    });
                }
            }
        }
        for e in &self.stray {
            violations.push(Violation::UnknownEndpoint {
                src: e.src,
                dst: e.dst,
            });
        }
        for edges in &self.out {
            for (i, e) in edges.iter().enumerate() {
                if e.src == e.dst {
                    violations.push(Violation::SelfLoop { node: e.src });
                }
                if i > 0 && edges[i - 1].dst == e.dst {
                    violations.push(Violation::DuplicateEdge {
                        src: e.src,
                        dst: e.dst,
                    });
                }
                // NaN fails `> 0.0` as well, which is what we want.
                if !(e.objective > 0.0 && e.objective.is_finite()) {
                    violations.push(Violation::NonPositiveObjective {
                        src: e.src,
                        dst: e.dst,
                        value: e.objective,
                    });
                }
                if !(e.budget > 0.0 && e.budget.is_finite()) {
                    violations.push(Violation::NonPositiveBudget {
                        src: e.src,
                        dst: e.dst,
                        value: e.budget,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.stats.edge_count
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id < self.nodes.len()
    }

    pub fn stats(&self) -> &GraphStats {
        &self.stats
    }

    /// Outgoing edges of `id`, sorted by destination.
    pub fn out_edges(&self, id: NodeId) -> &[Edge] {
        &self.out[id]
    }

    /// Incoming edges of `id`, sorted by source.
    pub fn in_edges(&self, id: NodeId) -> &[Edge] {
        &self.inc[id]
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.out.iter().flatten()
    }

    pub fn edge(&self, src: NodeId, dst: NodeId) -> Option<&Edge> {
        let list = self.out.get(src)?;
        list.binary_search_by_key(&dst, |e| e.dst)
            .ok()
            .map(|i| &list[i])
    }

    /// Objective and budget score of a route: the sums over its edges.
    pub fn route_scores(&self, route: &Route) -> Result<Scores> {
        let nodes = route.nodes();
        if let Some(&first) = nodes.first() {
            if !self.contains(first) {
                return Err(KorError::UnknownNode(first));
            }
        }
        let mut scores = Scores::ZERO;
        for pair in nodes.windows(2) {
            let e = self
                .edge(pair[0], pair[1])
                .ok_or(KorError::InvalidRoute {
                    from: pair[0],
                    to: pair[1],
                })?;
            scores.objective += e.objective;
            scores.budget += e.budget;
        }
        Ok(scores)
    }

    /// True iff every keyword of `psi` appears on at least one route node.
    pub fn covers<S: AsRef<str>>(&self, route: &Route, psi: &[S]) -> bool {
        psi.iter().all(|kw| {
            route
                .nodes()
                .iter()
                .filter_map(|&v| self.node(v))
                .any(|node| node.has_keyword(kw.as_ref()))
        })
    }
}

/// A node sequence `v_0, ..., v_n`; nodes may repeat.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route(Vec<NodeId>);

impl Route {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        Route(nodes)
    }

    pub fn single(node: NodeId) -> Self {
        Route(vec![node])
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn into_nodes(self) -> Vec<NodeId> {
        self.0
    }

    pub fn source(&self) -> Option<NodeId> {
        self.0.first().copied()
    }

    pub fn target(&self) -> Option<NodeId> {
        self.0.last().copied()
    }

    /// Number of edges.
    pub fn hops(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Appends `tail`, whose first node must equal this route's last node.
    pub fn concat(&mut self, tail: &Route) {
        match (self.0.last(), tail.0.first()) {
            (Some(a), Some(b)) => {
                debug_assert_eq!(a, b, "routes must share the junction node");
                self.0.extend_from_slice(&tail.0[1..]);
            }
            (None, _) => self.0.extend_from_slice(&tail.0),
            (_, None) => {}
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "v{v}")?;
        }
        write!(f, ">")
    }
}
