use std::collections::BTreeMap;

use crate::graph::{Graph, NodeId};

/// Keyword -> ascending, duplicate-free list of nodes carrying it.
#[derive(Clone, Debug, Default)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<NodeId>>,
}

impl InvertedIndex {
    pub fn build(graph: &Graph) -> Self {
        let mut postings: BTreeMap<String, Vec<NodeId>> = BTreeMap::new();
        // Nodes are visited in id order, so each list comes out sorted.
        for node in graph.nodes() {
            for kw in &node.keywords {
                postings.entry(kw.clone()).or_default().push(node.id);
            }
        }
        InvertedIndex { postings }
    }

    /// Nodes carrying `keyword`; empty for unknown keywords.
    pub fn postings(&self, keyword: &str) -> &[NodeId] {
        self.postings.get(keyword).map_or(&[], Vec::as_slice)
    }

    pub fn document_frequency(&self, keyword: &str) -> usize {
        self.postings(keyword).len()
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> + '_ {
        self.postings.keys().map(String::as_str)
    }

    pub fn vocabulary_len(&self) -> usize {
        self.postings.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture_a;

    #[test]
    fn postings_match_a_scan() {
        let g = fixture_a();
        let index = InvertedIndex::build(&g);
        for kw in ["t1", "t2", "t3", "t4", "t5"] {
            let scan: Vec<NodeId> = g
                .nodes()
                .iter()
                .filter(|n| n.has_keyword(kw))
                .map(|n| n.id)
                .collect();
            assert_eq!(index.postings(kw), scan.as_slice(), "{kw}");
        }
        assert_eq!(index.postings("t2"), &[3, 6]);
        assert_eq!(index.document_frequency("t1"), 2);
    }

    #[test]
    fn unknown_keyword_is_empty() {
        let index = InvertedIndex::build(&fixture_a());
        assert!(index.postings("museum").is_empty());
        assert_eq!(index.document_frequency("museum"), 0);
    }

    #[test]
    fn union_of_postings_is_every_tagged_node() {
        let g = fixture_a();
        let index = InvertedIndex::build(&g);
        let mut all: Vec<NodeId> = index
            .vocabulary()
            .flat_map(|kw| index.postings(kw).iter().copied())
            .collect();
        all.sort_unstable();
        all.dedup();
        let tagged: Vec<NodeId> = g
            .nodes()
            .iter()
            .filter(|n| !n.keywords.is_empty())
            .map(|n| n.id)
            .collect();
        assert_eq!(all, tagged);
    }
}
