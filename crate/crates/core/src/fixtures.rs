//! Small reference graphs shipped with the crate.

use crate::graph::{load_graph, Graph};

/// An 8-node graph over keywords `t1..t5` used throughout the tests and the
/// README walkthrough.
pub const FIXTURE_A: &str = include_str!("../data/fixture_a.kor");

pub fn fixture_a() -> Graph {
    load_graph(FIXTURE_A.as_bytes()).expect("bundled fixture parses")
}
