//! Importance-weighted loss estimates built from one round's feedback.
//!
//! `basic`: `l(i) / P(i) * 1{I in N(i)}`, valid when every node has a self-loop.
//! `shifted`: same rule, except for the (at most one) loopless node `j` with
//! `p(j) > 1/2`, which gets `(l(j) - 1) / P(j) * 1{I in N(j)} + 1`.

use serde::{Deserialize, Serialize};

use crate::distribution::ActionDistribution;
use crate::error::{Error, Result};
use crate::graph::FeedbackGraph;

/// Observation probabilities below this are treated as degenerate.
pub const MIN_OBSERVATION_PROB: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Basic,
    Shifted,
}

/// Feedback of one round: the played action and the losses of its neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundObservation<'g> {
    chosen: usize,
    graph: &'g FeedbackGraph,
    observed: Vec<(usize, f64)>,
}

impl<'g> RoundObservation<'g> {
    /// `observed` must cover exactly `N(chosen)`, in any order.
    pub fn new(chosen: usize, graph: &'g FeedbackGraph, mut observed: Vec<(usize, f64)>) -> Result<Self> {
        if chosen >= graph.num_nodes() {
            return Err(Error::InvalidParams(format!("chosen action {chosen} out of range")));
        }
        observed.sort_unstable_by_key(|&(i, _)| i);
        let keys: Vec<usize> = observed.iter().map(|&(i, _)| i).collect();
        if keys != graph.neighbors(chosen) {
            return Err(Error::InvalidParams(format!(
                "observed keys {keys:?} differ from the neighbourhood {:?} of action {chosen}",
                graph.neighbors(chosen)
            )));
        }
        if let Some(&(i, l)) = observed.iter().find(|(_, l)| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidParams(format!("loss {l} of action {i} outside [0, 1]")));
        }
        Ok(Self { chosen, graph, observed })
    }

    /// Reveals `losses` on `N(chosen)`.
    pub fn reveal(chosen: usize, graph: &'g FeedbackGraph, losses: &[f64]) -> Result<Self> {
        if losses.len() != graph.num_nodes() {
            return Err(Error::InvalidParams(format!("{} losses for {} actions", losses.len(), graph.num_nodes())));
        }
        if chosen >= graph.num_nodes() {
            return Err(Error::InvalidParams(format!("chosen action {chosen} out of range")));
        }
        let observed = graph.neighbors(chosen).iter().map(|&i| (i, losses[i])).collect();
        Self::new(chosen, graph, observed)
    }

    pub fn chosen(&self) -> usize {
        self.chosen
    }

    pub fn graph(&self) -> &'g FeedbackGraph {
        self.graph
    }

    pub fn observed(&self) -> &[(usize, f64)] {
        &self.observed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatedLoss {
    pub values: Vec<f64>,
    pub kind: EstimatorKind,
}

/// The node with a shifted estimate this round, if any.
pub fn shifted_node(g: &FeedbackGraph, p: &ActionDistribution) -> Option<usize> {
    g.loopless_nodes().iter().copied().find(|&i| p.probs()[i] > 0.5)
}

pub fn estimate(kind: EstimatorKind, obs: &RoundObservation<'_>, p: &ActionDistribution) -> Result<EstimatedLoss> {
    match kind {
        EstimatorKind::Basic => estimate_basic(obs, p),
        EstimatorKind::Shifted => estimate_shifted(obs, p),
    }
}

pub fn estimate_basic(obs: &RoundObservation<'_>, p: &ActionDistribution) -> Result<EstimatedLoss> {
    if let Some(&i) = obs.graph.loopless_nodes().first() {
        return Err(Error::MissingSelfLoop(i));
    }
    Ok(EstimatedLoss { values: importance_weighted(obs, p, None)?, kind: EstimatorKind::Basic })
}

pub fn estimate_shifted(obs: &RoundObservation<'_>, p: &ActionDistribution) -> Result<EstimatedLoss> {
    if !obs.graph.is_strongly_observable() {
        return Err(Error::NotStronglyObservable);
    }
    let shifted = shifted_node(obs.graph, p);
    Ok(EstimatedLoss { values: importance_weighted(obs, p, shifted)?, kind: EstimatorKind::Shifted })
}

fn importance_weighted(obs: &RoundObservation<'_>, p: &ActionDistribution, shifted: Option<usize>) -> Result<Vec<f64>> {
    let g = obs.graph;
    if p.len() != g.num_nodes() {
        return Err(Error::InvalidDistribution(format!("{} probabilities for {} actions", p.len(), g.num_nodes())));
    }
    let probs = p.probs();
    let mut values = vec![0.0; g.num_nodes()];
    // I in N(i) iff i in N(I), so the observed nodes are exactly those with a nonzero indicator.
    for &(i, loss) in &obs.observed {
        let prob = g.neighborhood_prob(probs, i);
        if prob < MIN_OBSERVATION_PROB {
            return Err(Error::DegenerateProbability { node: i, prob });
        }
        values[i] = if shifted == Some(i) { (loss - 1.0) / prob } else { loss / prob };
    }
    if let Some(j) = shifted {
        values[j] += 1.0;
    }
    Ok(values)
}
