//! Small random instances and independent reference computations shared by
//! the integration tests.
#![allow(dead_code)]

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use kor_core::{Edge, Graph, Node, NodeId, Query};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VOCAB: [&str; 4] = ["a", "b", "c", "d"];

/// Up to `max_nodes` nodes, integer weights in 1..=5, each node carrying
/// each of four keywords with probability 0.3.
pub fn random_graph(seed: u64, max_nodes: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_nodes);
    let density = rng.gen_range(0.25..0.6);
    let nodes = (0..n)
        .map(|id| Node::new(id, VOCAB.iter().filter(|_| rng.gen_bool(0.3)).copied()))
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density) {
                let o = rng.gen_range(1..=5) as f64;
                let b = rng.gen_range(1..=5) as f64;
                edges.push(Edge::new(u, v, o, b));
            }
        }
    }
    if edges.is_empty() {
        edges.push(Edge::new(0, 1, 1.0, 1.0));
    }
    Graph::new(nodes, edges).expect("generated graph is valid")
}

/// A query with 1..=3 keywords and a budget limit between `b_min` and
/// `10·b_min`.
pub fn random_query(graph: &Graph, seed: u64) -> Query {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = graph.node_count();
    let s = rng.gen_range(0..n);
    let t = rng.gen_range(0..n);
    let m = rng.gen_range(1..=3);
    let kws: Vec<&str> = VOCAB.choose_multiple(&mut rng, m).copied().collect();
    let b_min = graph.stats().b_min;
    let delta = b_min * rng.gen_range(2..=10) as f64;
    Query::new(s, t, kws, delta)
}

pub fn instance(seed: u64) -> (Graph, Query) {
    let g = random_graph(seed, 10);
    let q = random_query(&g, seed);
    (g, q)
}

/// Single-criterion shortest distances from `source`, weight chosen by `w`.
pub fn dijkstra(graph: &Graph, source: NodeId, w: impl Fn(&Edge) -> f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    dist[source] = 0.0;
    // Integer weights only, so distances are exact in u64 millis.
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        let d = d as f64 / 1000.0;
        if d > dist[u] {
            continue;
        }
        for e in graph.out_edges(u) {
            let nd = d + w(e);
            if nd < dist[e.dst] {
                dist[e.dst] = nd;
                heap.push(Reverse(((nd * 1000.0).round() as u64, e.dst)));
            }
        }
    }
    dist
}
