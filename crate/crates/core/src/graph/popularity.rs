//! Turning trip counts into a graph whose objective rewards popular routes.
//!
//! An edge visited by `count` of `total` trips has probability
//! `Pr = count / total` and objective `ln(1 / Pr)`. A route's objective score
//! is then `ln(1 / PS)` where `PS` is the product of its edge probabilities, so
//! the minimum-objective route is the most popular one.

use std::collections::HashSet;

use super::{Edge, Graph, Node, NodeId};
use crate::error::{KorError, Result};

/// Edge probabilities are clamped to this value so every objective stays
/// strictly positive.
pub const MAX_EDGE_PROBABILITY: f64 = 1.0 - 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripCount {
    pub src: NodeId,
    pub dst: NodeId,
    pub count: u64,
}

/// Builds a graph from per-pair trip counts. Budgets are the Euclidean
/// distances between the endpoint coordinates.
pub fn build_from_trajectories(
    node_keywords: Vec<Vec<String>>,
    coordinates: &[(f64, f64)],
    trips: &[TripCount],
    total_trips: u64,
) -> Result<Graph> {
    if node_keywords.len() != coordinates.len() {
        return Err(KorError::Parameter(format!(
            "{} keyword sets but {} coordinates",
            node_keywords.len(),
            coordinates.len()
        )));
    }
    let nodes: Vec<Node> = node_keywords
        .into_iter()
        .enumerate()
        .map(|(id, kws)| Node::new(id, kws))
        .collect();

    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(trips.len());
    for trip in trips {
        if trip.count == 0 || trip.count > total_trips {
            return Err(KorError::Constraint(format!(
                "trip count {} for ({},{}) outside 1..={total_trips}",
                trip.count, trip.src, trip.dst
            )));
        }
        if !seen.insert((trip.src, trip.dst)) {
            return Err(KorError::Constraint(format!(
                "trip pair ({},{}) listed twice",
                trip.src, trip.dst
            )));
        }
        let (a, b) = match (coordinates.get(trip.src), coordinates.get(trip.dst)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(KorError::Constraint(format!(
                    "trip pair ({},{}) references an unknown node",
                    trip.src, trip.dst
                )))
            }
        };
        let pr = (trip.count as f64 / total_trips as f64).min(MAX_EDGE_PROBABILITY);
        let distance = (a.0 - b.0).hypot(a.1 - b.1);
        edges.push(Edge::new(trip.src, trip.dst, (1.0 / pr).ln(), distance));
    }
    Graph::new(nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Route;

    fn line_graph(counts: &[u64], total: u64) -> Graph {
        let n = counts.len() + 1;
        let coords: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
        let trips: Vec<TripCount> = counts
            .iter()
            .enumerate()
            .map(|(i, &count)| TripCount {
                src: i,
                dst: i + 1,
                count,
            })
            .collect();
        build_from_trajectories(vec![Vec::new(); n], &coords, &trips, total).unwrap()
    }

    #[test]
    fn single_trip_objective() {
        let g = line_graph(&[1], 100);
        let e = g.edge(0, 1).unwrap();
        assert!((e.objective - 100f64.ln()).abs() < 1e-12);
        assert_eq!(e.budget, 1.0);
    }

    #[test]
    fn popular_edges_are_cheaper() {
        let g = line_graph(&[10, 1], 100);
        assert!(g.edge(0, 1).unwrap().objective < g.edge(1, 2).unwrap().objective);
    }

    #[test]
    fn route_objective_is_log_inverse_popularity() {
        let (counts, total) = ([30u64, 7, 52], 200u64);
        let g = line_graph(&counts, total);
        let ps: f64 = counts.iter().map(|&c| c as f64 / total as f64).product();
        let os = g.route_scores(&Route::new(vec![0, 1, 2, 3])).unwrap().objective;
        assert!((os - (1.0 / ps).ln()).abs() < 1e-12);
    }

    #[test]
    fn certain_edges_keep_positive_objective() {
        let g = line_graph(&[5], 5);
        assert!(g.edge(0, 1).unwrap().objective > 0.0);
    }

    #[test]
    fn rejects_bad_counts() {
        let coords = [(0.0, 0.0), (1.0, 0.0)];
        let kws = vec![Vec::new(), Vec::new()];
        let zero = [TripCount { src: 0, dst: 1, count: 0 }];
        assert!(build_from_trajectories(kws.clone(), &coords, &zero, 10).is_err());
        let over = [TripCount { src: 0, dst: 1, count: 11 }];
        assert!(build_from_trajectories(kws, &coords, &over, 10).is_err());
    }
}
