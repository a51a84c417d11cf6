use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Graph, Route};
use crate::query::Query;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    OsScaling,
    BucketBound,
    Greedy,
    Oracle,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OsScaling => "osscaling",
            Algorithm::BucketBound => "bucketbound",
            Algorithm::Greedy => "greedy",
            Algorithm::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreedyMode {
    /// Always cover every keyword; the budget may be exceeded.
    Keyword,
    /// Never exceed the budget; keywords may be left uncovered.
    Budget,
}

/// Echo of the parameters a result was computed with.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<GreedyMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt1: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt2: Option<bool>,
    pub k: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub labels_generated: u64,
    pub labels_pruned: u64,
    pub labels_dominated: u64,
    pub max_live_per_node: usize,
    /// Successive values of the objective upper bound.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub upper_bounds: Vec<f64>,
}

/// A route with scores recomputed from the graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteResult {
    pub route: Route,
    pub objective: f64,
    pub budget: f64,
    pub feasible: bool,
    pub covers: bool,
    pub algorithm: Algorithm,
    pub params: Params,
    pub stats: SearchStats,
}

impl RouteResult {
    /// Scores the route against the graph; fails if it is not a valid walk.
    pub fn assemble(
        graph: &Graph,
        query: &Query,
        route: Route,
        algorithm: Algorithm,
        params: Params,
        stats: SearchStats,
    ) -> Result<Self> {
        let scores = graph.route_scores(&route)?;
        let covers = graph.covers(&route, &query.keywords);
        let ends_right = route.source() == Some(query.source) && route.target() == Some(query.target);
        Ok(RouteResult {
            objective: scores.objective,
            budget: scores.budget,
            feasible: ends_right && covers && scores.budget <= query.budget_limit,
            covers,
            route,
            algorithm,
            params,
            stats,
        })
    }
}
