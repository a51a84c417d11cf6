//! Keyword-aware optimal route search.

pub mod bench;
pub mod bucketbound;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod graph;
pub mod greedy;
pub mod index;
pub mod label;
pub mod oracle;
pub mod osscaling;
pub mod preprocess;
pub mod query;
pub mod result;
mod search;

pub use bucketbound::{kkr_bucketbound, kor_bucketbound, BucketBoundOptions};
pub use error::{KorError, Result};
pub use graph::{Edge, Graph, Node, NodeId, Route, Scores};
pub use greedy::{kor_greedy, GreedyOptions};
pub use index::InvertedIndex;
pub use preprocess::{all_pairs_best, LazyTables, PathKind, PathTables, PreprocessTables};
pub use query::{KeywordMask, Query, QueryTerms};
pub use oracle::{feasible_exists, kkr_exact, kor_exact, OracleLimits};
pub use osscaling::{kkr_osscaling, kor_osscaling, OsScalingOptions};
pub use result::{Algorithm, GreedyMode, Params, RouteResult, SearchStats};
