//! The `kor-graph v1` text format.
//!
//! ```text
//! kor-graph v1
//! nodes <N>
//! <id> <kw1,kw2,...>      (N lines, `-` for an empty keyword set)
//! edges <M>
//! <src> <dst> <objective> <budget>      (M lines)
//! ```

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{is_valid_keyword, Edge, Graph, Node};
use crate::error::{KorError, Result};

pub const GRAPH_HEADER: &str = "kor-graph v1";

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            Some(line) => {
                self.number += 1;
                Ok(Some(line?.trim_end().to_owned()))
            }
            None => Ok(None),
        }
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| KorError::parse(self.number + 1, format!("unexpected end of input, expected {what}")))
    }
}

fn parse_count(line: &str, keyword: &str, number: usize) -> Result<usize> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(n), None) if k == keyword => n
            .parse()
            .map_err(|_| KorError::parse(number, format!("invalid {keyword} count {n:?}"))),
        _ => Err(KorError::parse(
            number,
            format!("expected `{keyword} <count>`, found {line:?}"),
        )),
    }
}

/// Parses a graph from the text format, reporting the offending line on error.
pub fn load_graph<R: BufRead>(reader: R) -> Result<Graph> {
    let mut lines = Lines {
        inner: reader.lines(),
        number: 0,
    };

    let header = lines.expect_line("header")?;
    if header != GRAPH_HEADER {
        return Err(KorError::parse(
            lines.number,
            format!("expected header {GRAPH_HEADER:?}, found {header:?}"),
        ));
    }

    let line = lines.expect_line("node count")?;
    let n = parse_count(&line, "nodes", lines.number)?;
    if n == 0 {
        return Err(KorError::parse(lines.number, "graph has no nodes"));
    }

    let mut slots: Vec<Option<Node>> = vec![None; n];
    for _ in 0..n {
        let line = lines.expect_line("node line")?;
        let number = lines.number;
        let mut parts = line.split_whitespace();
        let (id, kws) = match (parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(kws), None) => (id, kws),
            _ => {
                return Err(KorError::parse(
                    number,
                    format!("expected `<id> <keywords>`, found {line:?}"),
                ))
            }
        };
        let id: usize = id
            .parse()
            .map_err(|_| KorError::parse(number, format!("invalid node id {id:?}")))?;
        if id >= n {
            return Err(KorError::parse(number, format!("node id {id} out of range 0..{n}")));
        }
        if slots[id].is_some() {
            return Err(KorError::parse(number, format!("node {id} listed twice")));
        }
        let keywords: Vec<&str> = if kws == "-" {
            Vec::new()
        } else {
            kws.split(',').collect()
        };
        if let Some(bad) = keywords.iter().find(|k| !is_valid_keyword(k)) {
            return Err(KorError::parse(number, format!("invalid keyword {bad:?}")));
        }
        slots[id] = Some(Node::new(id, keywords));
    }
    // n distinct ids below n means every slot is filled.
    let nodes: Vec<Node> = slots.into_iter().map(Option::unwrap).collect();

    let line = lines.expect_line("edge count")?;
    let m = parse_count(&line, "edges", lines.number)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    for _ in 0..m {
        let line = lines.expect_line("edge line")?;
        let number = lines.number;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(KorError::parse(
                number,
                format!("expected `<src> <dst> <objective> <budget>`, found {line:?}"),
            ));
        }
        let id = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| KorError::parse(number, format!("invalid node id {s:?}")))?;
            if v >= n {
                return Err(KorError::parse(number, format!("node id {v} out of range 0..{n}")));
            }
            Ok(v)
        };
        let value = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| KorError::parse(number, format!("invalid {what} {s:?}")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(KorError::parse(number, format!("{what} must be positive, found {s}")));
            }
            Ok(v)
        };
        let (src, dst) = (id(fields[0])?, id(fields[1])?);
        if src == dst {
            return Err(KorError::parse(number, format!("self-loop on node {src}")));
        }
        if !seen.insert((src, dst)) {
            return Err(KorError::parse(number, format!("duplicate edge ({src},{dst})")));
        }
        edges.push(Edge::new(
            src,
            dst,
            value(fields[2], "objective")?,
            value(fields[3], "budget")?,
        ));
    }

    while let Some(extra) = lines.next_line()? {
        if !extra.is_empty() {
            return Err(KorError::parse(lines.number, "trailing content after edges"));
        }
    }

    Graph::new(nodes, edges)
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<Graph> {
    load_graph(BufReader::new(File::open(path)?))
}

pub fn write_graph<W: Write>(graph: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "{GRAPH_HEADER}")?;
    writeln!(w, "nodes {}", graph.node_count())?;
    for node in graph.nodes() {
        if node.keywords.is_empty() {
            writeln!(w, "{} -", node.id)?;
        } else {
            writeln!(w, "{} {}", node.id, node.keywords.join(","))?;
        }
    }
    writeln!(w, "edges {}", graph.edge_count())?;
    for e in graph.edges() {
        // `{}` on f64 prints the shortest representation that parses back exactly.
        writeln!(w, "{} {} {} {}", e.src, e.dst, e.objective, e.budget)?;
    }
    Ok(())
}

pub fn write_graph_file(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_graph(graph, &mut w)?;
    w.flush()?;
    Ok(())
}
