//! Independence numbers. Exact mode is a branch-and-bound maximum clique
//! search on the complement graph with greedy-colouring bounds; greedy mode
//! is the min-degree heuristic.

use serde::{Deserialize, Serialize};

use super::{FeedbackGraph, NodeSet};
use crate::error::{Error, Result};

pub const DEFAULT_EXACT_LIMIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependenceMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependenceMethod {
    Exact,
    GreedyLowerBound,
}

/// An independent set together with how it was obtained. For exact
/// certificates `alpha == witness_set.len()` is the independence number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub alpha: usize,
    pub witness_set: Vec<usize>,
    pub method: IndependenceMethod,
}

/// True when no two distinct members are adjacent. Self-loops are ignored.
pub fn is_independent_set(g: &FeedbackGraph, set: &[usize]) -> bool {
    set.iter()
        .enumerate()
        .all(|(a, &u)| set[a + 1..].iter().all(|&v| u != v && !g.is_adjacent(u, v)))
}

pub fn independence_number(g: &FeedbackGraph, mode: IndependenceMode) -> Result<IndependenceCertificate> {
    independence_number_with_limit(g, mode, DEFAULT_EXACT_LIMIT)
}

pub fn independence_number_with_limit(
    g: &FeedbackGraph,
    mode: IndependenceMode,
    exact_limit: usize,
) -> Result<IndependenceCertificate> {
    match mode {
        IndependenceMode::Greedy => {
            let witness_set = greedy_independent_set(g);
            Ok(IndependenceCertificate {
                alpha: witness_set.len(),
                witness_set,
                method: IndependenceMethod::GreedyLowerBound,
            })
        }
        IndependenceMode::Exact => {
            let k = g.num_nodes();
            if k > exact_limit {
                return Err(Error::SizeLimitExceeded { nodes: k, limit: exact_limit });
            }
            let witness_set = maximum_independent_set(g);
            Ok(IndependenceCertificate {
                alpha: witness_set.len(),
                witness_set,
                method: IndependenceMethod::Exact,
            })
        }
    }
}

/// Repeatedly takes the remaining node with fewest remaining neighbours
/// (lowest id on ties) and deletes its neighbourhood.
fn greedy_independent_set(g: &FeedbackGraph) -> Vec<usize> {
    let rows = g.loopless_rows();
    let mut remaining = NodeSet::full(g.num_nodes());
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let v = remaining
            .iter()
            .min_by_key(|&v| (rows[v].intersection(&remaining).len(), v))
            .expect("nonempty");
        out.push(v);
        remaining.remove(v);
        remaining.difference_with(&rows[v]);
    }
    out.sort_unstable();
    out
}

fn maximum_independent_set(g: &FeedbackGraph) -> Vec<usize> {
    let k = g.num_nodes();
    // Complement adjacency without self-loops: cliques here are independent sets in g.
    let comp: Vec<NodeSet> = g
        .loopless_rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut c = NodeSet::full(k);
            c.difference_with(&row);
            c.remove(i);
            c
        })
        .collect();

    let mut search = CliqueSearch { comp: &comp, best: greedy_independent_set(g), current: Vec::new() };
    search.expand(NodeSet::full(k));
    let mut best = search.best;
    best.sort_unstable();
    best
}

struct CliqueSearch<'a> {
    comp: &'a [NodeSet],
    best: Vec<usize>,
    current: Vec<usize>,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut cand: NodeSet) {
        let (order, colors) = self.color_sort(&cand);
        for idx in (0..order.len()).rev() {
            if self.current.len() + colors[idx] <= self.best.len() {
                return;
            }
            let v = order[idx];
            self.current.push(v);
            let next = cand.intersection(&self.comp[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            cand.remove(v);
        }
    }

    /// Greedy colouring of `cand` in the complement; returns vertices in
    /// colour order with the running colour count as an upper bound.
    fn color_sort(&self, cand: &NodeSet) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = cand.clone();
        let mut order = Vec::with_capacity(cand.len());
        let mut colors = Vec::with_capacity(cand.len());
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.difference_with(&self.comp[v]);
                uncolored.remove(v);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }
}
