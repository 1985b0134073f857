//! Greedy certificate for the variance bound
//! `sum_{v in U} p(v)^{1+b} / P(v) <= alpha^{1-b}` over self-looped subsets `U`.

use super::{FeedbackGraph, NodeSet};
use crate::distribution::ActionDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCertificate {
    /// `sum_{v in U} p(v)^{1+b} / P(v)` with `P` taken over the full graph.
    pub value: f64,
    /// Independent set built by the greedy rule on the subgraph induced by `U`.
    pub greedy_set: Vec<usize>,
    /// `sum_{v in greedy_set} p(v)^b`, which upper-bounds `value`.
    pub greedy_bound: f64,
}

pub fn variance_certificate(
    g: &FeedbackGraph,
    p: &ActionDistribution,
    b: f64,
    subset: &[usize],
) -> Result<VarianceCertificate> {
    let k = g.num_nodes();
    if p.len() != k {
        return Err(Error::InvalidDistribution(format!("{} probabilities for {k} nodes", p.len())));
    }
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::InvalidParams(format!("exponent b = {b} outside [0, 1]")));
    }
    if subset.is_empty() {
        return Err(Error::InvalidParams("variance subset is empty".into()));
    }
    if let Some(&v) = subset.iter().find(|&&v| v >= k) {
        return Err(Error::InvalidParams(format!("node {v} out of range")));
    }
    if let Some(&v) = subset.iter().find(|&&v| !g.has_self_loop(v)) {
        return Err(Error::InvalidSubset { node: v });
    }
    let p = p.probs();
    let u = NodeSet::from_nodes(k, subset.iter().copied());

    let value = u
        .iter()
        .map(|v| if p[v] > 0.0 { p[v].powf(1.0 + b) / g.neighborhood_prob(p, v) } else { 0.0 })
        .sum();

    // Denominators are fixed on G[U]; the greedy picks the max ratio among
    // the nodes still present, lowest id first on ties.
    let denom: Vec<f64> = (0..k)
        .map(|v| if u.contains(v) { g.neighborhood(v).iter().filter(|&w| u.contains(w)).map(|w| p[w]).sum() } else { 0.0 })
        .collect();
    let ratio = |v: usize| {
        let num = p[v].powf(b);
        if denom[v] > 0.0 {
            num / denom[v]
        } else if num > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };

    let mut remaining = u;
    let mut greedy_set = Vec::new();
    while !remaining.is_empty() {
        let mut best = None::<(usize, f64)>;
        for v in remaining.iter() {
            let r = ratio(v);
            if best.is_none_or(|(_, br)| r > br) {
                best = Some((v, r));
            }
        }
        let (v, _) = best.expect("nonempty");
        greedy_set.push(v);
        remaining.difference_with(g.neighborhood(v));
    }
    greedy_set.sort_unstable();
    let greedy_bound = greedy_set.iter().map(|&v| p[v].powf(b)).sum();

    Ok(VarianceCertificate { value, greedy_set, greedy_bound })
}
