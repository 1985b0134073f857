//! Feedback graphs: representation, strong observability, independence
//! numbers, the greedy variance certificate, generators and the edge-list
//! text format.

mod certificate;
mod edgelist;
mod generate;
mod independence;
mod nodeset;

pub use certificate::{variance_certificate, VarianceCertificate};
pub use edgelist::{parse_edge_list, to_edge_list};
pub use generate::{generate_graph, GraphKind};
pub use independence::{
    independence_number, independence_number_with_limit, is_independent_set,
    IndependenceCertificate, IndependenceMethod, IndependenceMode, DEFAULT_EXACT_LIMIT,
};
pub use nodeset::NodeSet;

use crate::distribution::ActionDistribution;

/// Undirected graph over `K` actions. Self-loops are explicit adjacency
/// entries; `N(i)` includes `i` exactly when `i` has a self-loop.
///
/// Adjacency is symmetric by construction and the value is immutable once
/// built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackGraph {
    rows: Vec<NodeSet>,
    neighbors: Vec<Vec<usize>>,
    loopless: Vec<usize>,
    strongly_observable: bool,
}

impl FeedbackGraph {
    /// Builds a graph from 0-indexed undirected edges; `(i, i)` adds a self-loop.
    ///
    /// Panics if `k == 0` or an endpoint is out of range.
    pub fn from_edges<I>(k: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        assert!(k >= 1, "a feedback graph needs at least one node");
        let mut rows = vec![NodeSet::empty(k); k];
        for (i, j) in edges {
            rows[i].insert(j);
            rows[j].insert(i);
        }
        Self::from_rows(rows)
    }

    fn from_rows(rows: Vec<NodeSet>) -> Self {
        let k = rows.len();
        let neighbors = rows.iter().map(|r| r.iter().collect()).collect();
        let loopless: Vec<usize> = (0..k).filter(|&i| !rows[i].contains(i)).collect();
        // A loopless node must be seen from every other node.
        let strongly_observable = loopless.iter().all(|&i| rows[i].len() == k - 1);
        Self { rows, neighbors, loopless, strongly_observable }
    }

    pub fn num_nodes(&self) -> usize {
        self.rows.len()
    }

    /// `N(i)` in ascending order.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn neighborhood(&self, i: usize) -> &NodeSet {
        &self.rows[i]
    }

    #[inline]
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    #[inline]
    pub fn has_self_loop(&self, i: usize) -> bool {
        self.rows[i].contains(i)
    }

    pub fn has_all_self_loops(&self) -> bool {
        self.loopless.is_empty()
    }

    /// Nodes without a self-loop (`S_t` for the round using this graph).
    pub fn loopless_nodes(&self) -> &[usize] {
        &self.loopless
    }

    /// Every node observes itself or is observed by all other nodes.
    pub fn is_strongly_observable(&self) -> bool {
        self.strongly_observable
    }

    /// Undirected edges `(i, j)` with `i <= j`, 0-indexed, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.num_nodes() {
            out.extend(self.neighbors[i].iter().filter(|&&j| j >= i).map(|&j| (i, j)));
        }
        out
    }

    /// Adjacency with self-loops dropped; independence is defined on this.
    pub(crate) fn loopless_rows(&self) -> Vec<NodeSet> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                r.remove(i);
                r
            })
            .collect()
    }

    /// `P(i) = sum_{j in N(i)} p(j)`, the probability of observing `i`'s loss.
    #[inline]
    pub fn neighborhood_prob(&self, p: &[f64], i: usize) -> f64 {
        self.neighbors[i].iter().map(|&j| p[j]).sum()
    }
}

/// Predicate form of [`FeedbackGraph::is_strongly_observable`].
pub fn validate_strong_observability(g: &FeedbackGraph) -> bool {
    g.is_strongly_observable()
}

/// `P(i)` for a validated distribution.
pub fn neighborhood_prob(g: &FeedbackGraph, p: &ActionDistribution, i: usize) -> f64 {
    g.neighborhood_prob(p.probs(), i)
}
