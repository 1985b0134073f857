use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FeedbackGraph;
use crate::error::{Error, Result};

/// Graph families. Every family yields strongly observable graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// Self-loops only (`alpha = K`).
    Bandit,
    /// Complete graph with self-loops (`alpha = 1`).
    Experts,
    /// Self-looped cliques of the given sizes, in node order (`alpha` = number of cliques).
    DisjointCliques { sizes: Vec<usize> },
    /// `G(K, prob)` with self-loops forced on.
    ErdosRenyi { prob: f64, seed: u64 },
    /// The first `hubs` nodes have no self-loop and are adjacent to every
    /// other node; the remaining nodes form self-looped cliques of sizes
    /// `leaf_cliques` (all singletons when absent).
    NoSelfloopStar {
        hubs: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        leaf_cliques: Option<Vec<usize>>,
    },
}

pub fn generate_graph(kind: &GraphKind, k: usize) -> Result<FeedbackGraph> {
    if k == 0 {
        return Err(Error::InvalidParams("K must be at least 1".into()));
    }
    let g = match kind {
        GraphKind::Bandit => FeedbackGraph::from_edges(k, (0..k).map(|i| (i, i))),
        GraphKind::Experts => FeedbackGraph::from_edges(k, (0..k).flat_map(|i| (i..k).map(move |j| (i, j)))),
        GraphKind::DisjointCliques { sizes } => {
            check_sizes(sizes, k)?;
            FeedbackGraph::from_edges(k, clique_edges(sizes, 0))
        }
        GraphKind::ErdosRenyi { prob, seed } => {
            if !(0.0..=1.0).contains(prob) {
                return Err(Error::InvalidParams(format!("edge probability {prob} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut edges: Vec<(usize, usize)> = (0..k).map(|i| (i, i)).collect();
            for i in 0..k {
                for j in i + 1..k {
                    if rng.random::<f64>() < *prob {
                        edges.push((i, j));
                    }
                }
            }
            FeedbackGraph::from_edges(k, edges)
        }
        GraphKind::NoSelfloopStar { hubs, leaf_cliques } => {
            let hubs = *hubs;
            if hubs > k {
                return Err(Error::InvalidParams(format!("{hubs} hubs exceed K = {k}")));
            }
            let leaves = k - hubs;
            let sizes = leaf_cliques.clone().unwrap_or_else(|| vec![1; leaves]);
            check_sizes(&sizes, leaves)?;
            let mut edges = clique_edges(&sizes, hubs);
            for h in 0..hubs {
                edges.extend((0..k).filter(|&j| j != h).map(|j| (h, j)));
            }
            FeedbackGraph::from_edges(k, edges)
        }
    };
    debug_assert!(g.is_strongly_observable());
    Ok(g)
}

fn check_sizes(sizes: &[usize], k: usize) -> Result<()> {
    if sizes.contains(&0) {
        return Err(Error::InvalidParams("clique sizes must be positive".into()));
    }
    let total: usize = sizes.iter().sum();
    if total != k {
        return Err(Error::InvalidParams(format!("clique sizes sum to {total}, expected {k}")));
    }
    Ok(())
}

fn clique_edges(sizes: &[usize], offset: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut start = offset;
    for &s in sizes {
        for i in start..start + s {
            edges.extend((i..start + s).map(|j| (i, j)));
        }
        start += s;
    }
    edges
}
