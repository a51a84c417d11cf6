use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KorError, Result};
use crate::graph::{is_valid_keyword, Graph, NodeId};
use crate::index::InvertedIndex;

/// Query keywords are tracked as bits of a `u32`.
pub const MAX_QUERY_KEYWORDS: usize = 32;

/// A KOR query: reach `target` from `source`, covering every keyword, with a
/// budget score of at most `budget_limit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub source: NodeId,
    pub target: NodeId,
    pub keywords: Vec<String>,
    #[serde(rename = "delta")]
    pub budget_limit: f64,
}

impl Query {
    pub fn new<I, S>(source: NodeId, target: NodeId, keywords: I, budget_limit: f64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut kws: Vec<String> = Vec::new();
        for kw in keywords {
            let kw = kw.into();
            if !kws.contains(&kw) {
                kws.push(kw);
            }
        }
        Query {
            source,
            target,
            keywords: kws,
            budget_limit,
        }
    }

    pub fn keyword_count(&self) -> usize {
        self.keywords.len()
    }

    pub fn validate(&self, graph: &Graph) -> Result<()> {
        for v in [self.source, self.target] {
            if !graph.contains(v) {
                return Err(KorError::UnknownNode(v));
            }
        }
        if !(self.budget_limit > 0.0) {
            return Err(KorError::Parameter(format!(
                "budget limit must be positive, got {}",
                self.budget_limit
            )));
        }
        if self.keywords.len() > MAX_QUERY_KEYWORDS {
            return Err(KorError::Parameter(format!(
                "at most {MAX_QUERY_KEYWORDS} query keywords are supported, got {}",
                self.keywords.len()
            )));
        }
        if let Some(bad) = self.keywords.iter().find(|k| !is_valid_keyword(k)) {
            return Err(KorError::Parameter(format!("invalid keyword {bad:?}")));
        }
        Ok(())
    }
}

/// A subset of the query keywords.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeywordMask(u32);

impl KeywordMask {
    pub const EMPTY: KeywordMask = KeywordMask(0);

    pub fn from_bits(bits: u32) -> Self {
        KeywordMask(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn single(index: usize) -> Self {
        KeywordMask(1 << index)
    }

    pub fn union(self, other: Self) -> Self {
        KeywordMask(self.0 | other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        KeywordMask(self.0 & !other.0)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn is_superset_of(self, other: Self) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }
}

impl fmt::Debug for KeywordMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeywordMask({:#b})", self.0)
    }
}

/// Per-query view of the keywords: bit positions and the mask each node
/// contributes.
#[derive(Clone, Debug)]
pub struct QueryTerms {
    terms: Vec<String>,
    node_masks: Vec<KeywordMask>,
    full: KeywordMask,
    frequencies: Vec<usize>,
}

impl QueryTerms {
    pub fn new(query: &Query, graph: &Graph, index: &InvertedIndex) -> Result<Self> {
        if query.keywords.len() > MAX_QUERY_KEYWORDS {
            return Err(KorError::Parameter(format!(
                "at most {MAX_QUERY_KEYWORDS} query keywords are supported"
            )));
        }
        let mut node_masks = vec![KeywordMask::EMPTY; graph.node_count()];
        let mut frequencies = Vec::with_capacity(query.keywords.len());
        let mut full = KeywordMask::EMPTY;
        for (bit, kw) in query.keywords.iter().enumerate() {
            let postings = index.postings(kw);
            frequencies.push(postings.len());
            full = full.union(KeywordMask::single(bit));
            for &v in postings {
                node_masks[v] = node_masks[v].union(KeywordMask::single(bit));
            }
        }
        Ok(QueryTerms {
            terms: query.keywords.clone(),
            node_masks,
            full,
            frequencies,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn full(&self) -> KeywordMask {
        self.full
    }

    /// Query keywords carried by `node`.
    pub fn mask_of(&self, node: NodeId) -> KeywordMask {
        self.node_masks[node]
    }

    pub fn document_frequency(&self, bit: usize) -> usize {
        self.frequencies[bit]
    }

    /// True when some query keyword appears on no node at all.
    pub fn has_orphan_keyword(&self) -> bool {
        self.frequencies.iter().any(|&f| f == 0)
    }

    /// The rarest keyword whose frequency is below `fraction * node_count`.
    pub fn rare_keyword(&self, fraction: f64) -> Option<usize> {
        let threshold = fraction * self.node_masks.len() as f64;
        (0..self.terms.len())
            .filter(|&i| self.frequencies[i] > 0 && (self.frequencies[i] as f64) < threshold)
            .min_by_key(|&i| (self.frequencies[i], i))
    }
}
