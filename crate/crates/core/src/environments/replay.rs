//! JSON-lines replay files: a header record carrying `K`, `T` and the graph
//! dictionary in edge-list form, then one `{"t", "graph_id", "losses"}`
//! record per round.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Environment, Round};
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, to_edge_list, FeedbackGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayGraph {
    pub id: usize,
    pub edge_list: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayHeader {
    #[serde(rename = "type")]
    pub record_type: String,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub graphs: Vec<ReplayGraph>,
}

/// Drains `env` into `out`.
pub fn write_replay<W: Write>(env: &mut dyn Environment, mut out: W) -> Result<()> {
    let header = ReplayHeader {
        record_type: "header".into(),
        k: env.num_actions(),
        horizon: env.horizon(),
        graphs: env.graphs().iter().enumerate().map(|(id, g)| ReplayGraph { id, edge_list: to_edge_list(g) }).collect(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    while let Some(round) = env.next_round() {
        serde_json::to_writer(&mut out, &round)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// A recorded stream played back round by round.
#[derive(Debug, Clone)]
pub struct ReplayEnvironment {
    k: usize,
    graphs: Vec<FeedbackGraph>,
    rounds: Vec<Round>,
    cursor: usize,
}

impl ReplayEnvironment {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let bad = |line: usize, msg: String| Error::Parse { line: line + 1, msg };

        let (n, first) = lines.next().ok_or_else(|| bad(0, "empty replay file".into()))?;
        let header: ReplayHeader = serde_json::from_str(&first?).map_err(|e| bad(n, e.to_string()))?;
        if header.record_type != "header" {
            return Err(bad(n, format!("expected a header record, got type `{}`", header.record_type)));
        }
        let mut graphs = Vec::with_capacity(header.graphs.len());
        for (pos, g) in header.graphs.iter().enumerate() {
            if g.id != pos {
                return Err(bad(n, format!("graph ids must be 0..n in order, found {} at {pos}", g.id)));
            }
            let graph = parse_edge_list(&g.edge_list)?;
            if graph.num_nodes() != header.k {
                return Err(bad(n, format!("graph {pos} has {} nodes, header says K = {}", graph.num_nodes(), header.k)));
            }
            if !graph.is_strongly_observable() {
                return Err(bad(n, format!("graph {pos} is not strongly observable")));
            }
            graphs.push(graph);
        }

        let mut rounds = Vec::new();
        for (n, line) in lines {
            let round: Round = serde_json::from_str(&line?).map_err(|e| bad(n, e.to_string()))?;
            if round.t != rounds.len() as u64 + 1 {
                return Err(bad(n, format!("expected round {}, found {}", rounds.len() + 1, round.t)));
            }
            if round.graph_id >= graphs.len() {
                return Err(bad(n, format!("unknown graph id {}", round.graph_id)));
            }
            if round.losses.len() != header.k || round.losses.iter().any(|l| !(0.0..=1.0).contains(l)) {
                return Err(bad(n, "losses must be K values in [0, 1]".into()));
            }
            rounds.push(round);
        }
        if rounds.len() as u64 != header.horizon {
            return Err(Error::Parse {
                line: rounds.len() + 1,
                msg: format!("header announces {} rounds, file has {}", header.horizon, rounds.len()),
            });
        }
        Ok(Self { k: header.k, graphs, rounds, cursor: 0 })
    }
}

impl Environment for ReplayEnvironment {
    fn num_actions(&self) -> usize {
        self.k
    }

    fn horizon(&self) -> u64 {
        self.rounds.len() as u64
    }

    fn graphs(&self) -> &[FeedbackGraph] {
        &self.graphs
    }

    fn next_round(&mut self) -> Option<Round> {
        let r = self.rounds.get(self.cursor).cloned();
        self.cursor += 1;
        r
    }
}
