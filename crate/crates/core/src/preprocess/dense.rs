use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Direction, PathKind, PathTables, ScoreView};
use crate::error::{KorError, Result};
use crate::graph::{Graph, NodeId, Route, Scores};

/// First bytes of a persisted table file.
pub const PRE_MAGIC: &[u8] = b"kor-pre v1\n";

const NO_SUCC: i32 = -1;

/// Dense all-pairs τ and σ scores with successor matrices, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PreprocessTables {
    n: usize,
    os_tau: Vec<f64>,
    bs_tau: Vec<f64>,
    os_sigma: Vec<f64>,
    bs_sigma: Vec<f64>,
    succ_tau: Vec<i32>,
    succ_sigma: Vec<i32>,
}

struct Closure {
    primary: Vec<f64>,
    secondary: Vec<f64>,
    succ: Vec<i32>,
}

fn floyd_warshall(graph: &Graph, kind: PathKind) -> Closure {
    let n = graph.node_count();
    let mut primary = vec![f64::INFINITY; n * n];
    let mut secondary = vec![f64::INFINITY; n * n];
    let mut succ = vec![NO_SUCC; n * n];
    for i in 0..n {
        primary[i * n + i] = 0.0;
        secondary[i * n + i] = 0.0;
    }
    for e in graph.edges() {
        let (p, s) = kind.key(Scores {
            objective: e.objective,
            budget: e.budget,
        });
        let ij = e.src * n + e.dst;
        primary[ij] = p;
        secondary[ij] = s;
        succ[ij] = e.dst as i32;
    }

    let mut row_p = vec![0.0; n];
    let mut row_s = vec![0.0; n];
    for k in 0..n {
        row_p.copy_from_slice(&primary[k * n..(k + 1) * n]);
        row_s.copy_from_slice(&secondary[k * n..(k + 1) * n]);
        for i in 0..n {
            let ik = i * n + k;
            let (pik, sik, first) = (primary[ik], secondary[ik], succ[ik]);
            if pik.is_infinite() || i == k {
                continue;
            }
            let base = i * n;
            for j in 0..n {
                let cand_p = pik + row_p[j];
                let cur_p = primary[base + j];
                // Lexicographic on (optimized, other): the optimized score is
                // always minimal and ties are settled by the other score.
                if cand_p < cur_p || (cand_p == cur_p && sik + row_s[j] < secondary[base + j]) {
                    primary[base + j] = cand_p;
                    secondary[base + j] = sik + row_s[j];
                    succ[base + j] = first;
                }
            }
        }
    }
    Closure {
        primary,
        secondary,
        succ,
    }
}

/// Computes τ and σ for every ordered node pair.
pub fn all_pairs_best(graph: &Graph) -> PreprocessTables {
    let n = graph.node_count();
    assert!(n <= i32::MAX as usize, "node ids must fit the successor format");
    let tau = floyd_warshall(graph, PathKind::Tau);
    let sigma = floyd_warshall(graph, PathKind::Sigma);
    PreprocessTables {
        n,
        os_tau: tau.primary,
        bs_tau: tau.secondary,
        os_sigma: sigma.secondary,
        bs_sigma: sigma.primary,
        succ_tau: tau.succ,
        succ_sigma: sigma.succ,
    }
}

impl PreprocessTables {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn os_tau(&self, i: NodeId, j: NodeId) -> f64 {
        self.os_tau[i * self.n + j]
    }

    pub fn bs_tau(&self, i: NodeId, j: NodeId) -> f64 {
        self.bs_tau[i * self.n + j]
    }

    pub fn os_sigma(&self, i: NodeId, j: NodeId) -> f64 {
        self.os_sigma[i * self.n + j]
    }

    pub fn bs_sigma(&self, i: NodeId, j: NodeId) -> f64 {
        self.bs_sigma[i * self.n + j]
    }

    pub fn scores(&self, kind: PathKind, i: NodeId, j: NodeId) -> Scores {
        let ij = i * self.n + j;
        match kind {
            PathKind::Tau => Scores {
                objective: self.os_tau[ij],
                budget: self.bs_tau[ij],
            },
            PathKind::Sigma => Scores {
                objective: self.os_sigma[ij],
                budget: self.bs_sigma[ij],
            },
        }
    }

    fn successor(&self, kind: PathKind, i: NodeId, j: NodeId) -> i32 {
        let ij = i * self.n + j;
        match kind {
            PathKind::Tau => self.succ_tau[ij],
            PathKind::Sigma => self.succ_sigma[ij],
        }
    }

    /// The τ or σ path from `i` to `j` as a node sequence.
    pub fn reconstruct_path(&self, kind: PathKind, i: NodeId, j: NodeId) -> Result<Route> {
        if i >= self.n || j >= self.n {
            return Err(KorError::UnknownNode(i.max(j)));
        }
        let mut nodes = vec![i];
        let mut cur = i;
        while cur != j {
            let next = self.successor(kind, cur, j);
            if next == NO_SUCC || nodes.len() > self.n {
                return Err(KorError::NoPath { from: i, to: j });
            }
            cur = next as usize;
            nodes.push(cur);
        }
        Ok(Route::new(nodes))
    }

    /// Cheap consistency check against a graph: sizes agree and no table
    /// entry is worse than the direct edge.
    pub fn check_against(&self, graph: &Graph) -> Result<()> {
        if self.n != graph.node_count() {
            return Err(KorError::TableMismatch(format!(
                "tables cover {} nodes, graph has {}",
                self.n,
                graph.node_count()
            )));
        }
        for e in graph.edges() {
            if self.os_tau(e.src, e.dst) > e.objective || self.bs_sigma(e.src, e.dst) > e.budget {
                return Err(KorError::TableMismatch(format!(
                    "entry ({},{}) is worse than the direct edge",
                    e.src, e.dst
                )));
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(PRE_MAGIC)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for m in [&self.os_tau, &self.bs_tau, &self.os_sigma, &self.bs_sigma] {
            for v in m.iter() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        for m in [&self.succ_tau, &self.succ_sigma] {
            for v in m.iter() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let bad = |msg: &str| KorError::TableMismatch(msg.to_owned());
        let mut magic = [0u8; PRE_MAGIC.len()];
        r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if magic != PRE_MAGIC {
            return Err(bad("not a kor-pre v1 file"));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word).map_err(|_| bad("truncated header"))?;
        let n = u64::from_le_bytes(word) as usize;
        let cells = n
            .checked_mul(n)
            .filter(|c| c.checked_mul(40).is_some())
            .ok_or_else(|| bad("node count too large"))?;

        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != cells * 40 {
            return Err(bad("payload length does not match node count"));
        }
        let (floats, ints) = bytes.split_at(cells * 32);
        let f64s: Vec<f64> = floats
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let i32s: Vec<i32> = ints
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if i32s.iter().any(|&s| s < NO_SUCC || s as i64 >= n as i64) {
            return Err(bad("successor out of range"));
        }
        let mut f = f64s.chunks_exact(cells).map(<[f64]>::to_vec);
        let mut s = i32s.chunks_exact(cells).map(<[i32]>::to_vec);
        Ok(PreprocessTables {
            n,
            os_tau: f.next().unwrap_or_default(),
            bs_tau: f.next().unwrap_or_default(),
            os_sigma: f.next().unwrap_or_default(),
            bs_sigma: f.next().unwrap_or_default(),
            succ_tau: s.next().unwrap_or_default(),
            succ_sigma: s.next().unwrap_or_default(),
        })
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(BufReader::new(File::open(path)?))
    }

    /// Bytes needed for `n` nodes.
    pub fn footprint(n: usize) -> u128 {
        (n as u128) * (n as u128) * 40
    }
}

impl PathTables for PreprocessTables {
    fn node_count(&self) -> usize {
        self.n
    }

    fn toward(&self, kind: PathKind, target: NodeId) -> ScoreView<'_> {
        ScoreView::Dense {
            tables: self,
            kind,
            anchor: target,
            direction: Direction::Toward,
        }
    }

    fn from(&self, kind: PathKind, source: NodeId, _limit: f64) -> ScoreView<'_> {
        ScoreView::Dense {
            tables: self,
            kind,
            anchor: source,
            direction: Direction::From,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture_a;

    #[test]
    fn fixture_pair_zero_seven() {
        let t = all_pairs_best(&fixture_a());
        assert_eq!(t.os_tau(0, 7), 4.0);
        assert_eq!(t.bs_tau(0, 7), 7.0);
        assert_eq!(t.os_sigma(0, 7), 9.0);
        assert_eq!(t.bs_sigma(0, 7), 5.0);
        assert_eq!(
            t.reconstruct_path(PathKind::Tau, 0, 7).unwrap().nodes(),
            &[0, 3, 4, 7]
        );
        assert_eq!(
            t.reconstruct_path(PathKind::Sigma, 0, 7).unwrap().nodes(),
            &[0, 3, 5, 7]
        );
    }

    #[test]
    fn fixture_completion_entries() {
        let t = all_pairs_best(&fixture_a());
        assert_eq!(t.bs_sigma(6, 7), 7.0);
        assert_eq!((t.os_tau(3, 7), t.bs_tau(3, 7)), (2.0, 5.0));
        assert_eq!((t.os_tau(5, 7), t.bs_tau(5, 7)), (3.0, 4.0));
    }

    #[test]
    fn diagonal_is_zero() {
        let g = fixture_a();
        let t = all_pairs_best(&g);
        for i in 0..g.node_count() {
            assert_eq!(t.scores(PathKind::Tau, i, i), Scores::ZERO);
            assert_eq!(t.scores(PathKind::Sigma, i, i), Scores::ZERO);
            assert_eq!(t.reconstruct_path(PathKind::Tau, i, i).unwrap().nodes(), &[i]);
        }
    }

    #[test]
    fn unreachable_pair() {
        let g = fixture_a();
        let t = all_pairs_best(&g);
        // Nothing leads back into v0.
        assert!(!t.scores(PathKind::Tau, 7, 0).is_reachable());
        assert!(matches!(
            t.reconstruct_path(PathKind::Sigma, 7, 0),
            Err(KorError::NoPath { from: 7, to: 0 })
        ));
    }

    #[test]
    fn persistence_round_trip() {
        let g = fixture_a();
        let t = all_pairs_best(&g);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert!(buf.starts_with(PRE_MAGIC));
        assert_eq!(buf.len(), PRE_MAGIC.len() + 8 + 64 * 40);
        let back = PreprocessTables::read(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        back.check_against(&g).unwrap();

        buf.pop();
        assert!(PreprocessTables::read(buf.as_slice()).is_err());
        assert!(PreprocessTables::read(&b"kor-pre v2\n"[..]).is_err());
    }
}
