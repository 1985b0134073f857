//! Edge-list text format: a `K <int>` header, then one 1-indexed `i j` pair
//! per line, self-loops written as `i i`.

use std::fmt::Write;

use super::FeedbackGraph;
use crate::error::{Error, Result};

pub fn to_edge_list(g: &FeedbackGraph) -> String {
    let mut out = format!("K {}\n", g.num_nodes());
    for (i, j) in g.edges() {
        writeln!(out, "{} {}", i + 1, j + 1).expect("writing to a String");
    }
    out
}

/// Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<FeedbackGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing `K <int>` header".into() })?;
    let k = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["K", n] => n.parse::<usize>().map_err(|e| Error::Parse { line: hline, msg: e.to_string() })?,
        _ => return Err(Error::Parse { line: hline, msg: format!("expected `K <int>`, got `{header}`") }),
    };
    if k == 0 {
        return Err(Error::Parse { line: hline, msg: "K must be positive".into() });
    }

    let mut edges = Vec::new();
    for (n, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = parts.as_slice() else {
            return Err(Error::Parse { line: n, msg: format!("expected `i j`, got `{line}`") });
        };
        let node = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| Error::Parse { line: n, msg: format!("bad node id `{s}`") })?;
            if v == 0 || v > k {
                return Err(Error::Parse { line: n, msg: format!("node {v} outside 1..={k}") });
            }
            Ok(v - 1)
        };
        edges.push((node(a)?, node(b)?));
    }
    Ok(FeedbackGraph::from_edges(k, edges))
}
