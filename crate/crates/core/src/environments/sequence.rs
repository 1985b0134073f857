use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::losses::LossSource;
use super::{Environment, Round};
use crate::error::{Error, Result};
use crate::graph::{generate_graph, FeedbackGraph, GraphKind};

/// Which graph of the dictionary is active at each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSchedule {
    Fixed { graph: GraphKind },
    /// Round `t` uses `graphs[(t - 1) % n]`.
    Periodic { graphs: Vec<GraphKind> },
    /// Graph `i` for `lengths[i]` consecutive rounds, cycling through the list.
    Segments { graphs: Vec<GraphKind>, lengths: Vec<u64> },
    /// Uniform i.i.d. draw from `graphs` each round.
    RandomPool { graphs: Vec<GraphKind> },
}

impl GraphSchedule {
    fn kinds(&self) -> &[GraphKind] {
        match self {
            GraphSchedule::Fixed { graph } => std::slice::from_ref(graph),
            GraphSchedule::Periodic { graphs } | GraphSchedule::Segments { graphs, .. } | GraphSchedule::RandomPool { graphs } => graphs,
        }
    }
}

/// Oblivious environment with a graph schedule and an independent loss source.
#[derive(Debug, Clone)]
pub struct ScheduledEnvironment {
    k: usize,
    horizon: u64,
    schedule: GraphSchedule,
    graphs: Vec<FeedbackGraph>,
    losses: LossSource,
    round: u64,
    loss_rng: ChaCha8Rng,
    graph_rng: ChaCha8Rng,
}

impl ScheduledEnvironment {
    pub fn new(k: usize, horizon: u64, schedule: GraphSchedule, losses: LossSource, seed: u64) -> Result<Self> {
        if k == 0 || horizon == 0 {
            return Err(Error::InvalidParams("K and T must be positive".into()));
        }
        if schedule.kinds().is_empty() {
            return Err(Error::InvalidParams("graph schedule is empty".into()));
        }
        if let GraphSchedule::Segments { graphs, lengths } = &schedule {
            if graphs.len() != lengths.len() || lengths.contains(&0) {
                return Err(Error::InvalidParams("segment lengths must be positive, one per graph".into()));
            }
        }
        losses.validate(k)?;
        let graphs = schedule.kinds().iter().map(|kind| generate_graph(kind, k)).collect::<Result<Vec<_>>>()?;
        let loss_rng = ChaCha8Rng::seed_from_u64(seed);
        let mut graph_rng = loss_rng.clone();
        graph_rng.set_stream(1);
        Ok(Self { k, horizon, schedule, graphs, losses, round: 0, loss_rng, graph_rng })
    }

    fn graph_at(&mut self, t: u64) -> usize {
        match &self.schedule {
            GraphSchedule::Fixed { .. } => 0,
            GraphSchedule::Periodic { graphs } => ((t - 1) % graphs.len() as u64) as usize,
            GraphSchedule::Segments { lengths, .. } => {
                let cycle: u64 = lengths.iter().sum();
                let mut pos = (t - 1) % cycle;
                lengths
                    .iter()
                    .position(|&len| {
                        if pos < len {
                            true
                        } else {
                            pos -= len;
                            false
                        }
                    })
                    .expect("position within one cycle")
            }
            GraphSchedule::RandomPool { graphs } => self.graph_rng.random_range(0..graphs.len()),
        }
    }

    pub fn loss_source(&self) -> &LossSource {
        &self.losses
    }
}

impl Environment for ScheduledEnvironment {
    fn num_actions(&self) -> usize {
        self.k
    }

    fn horizon(&self) -> u64 {
        self.horizon
    }

    fn graphs(&self) -> &[FeedbackGraph] {
        &self.graphs
    }

    fn next_round(&mut self) -> Option<Round> {
        if self.round >= self.horizon {
            return None;
        }
        self.round += 1;
        let t = self.round;
        let graph_id = self.graph_at(t);
        let losses = self.losses.draw(self.k, t, &mut self.loss_rng);
        Some(Round { t, graph_id, losses })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::collect_rounds;

    #[test]
    fn alternating_schedule() {
        let schedule = GraphSchedule::Periodic { graphs: vec![GraphKind::Experts, GraphKind::Bandit] };
        let mut env = ScheduledEnvironment::new(4, 10, schedule, LossSource::Constant { values: vec![0.0; 4] }, 0).unwrap();
        let ids: Vec<usize> = collect_rounds(&mut env).iter().map(|r| r.graph_id).collect();
        assert_eq!(ids, [0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn segments_cycle() {
        let schedule = GraphSchedule::Segments { graphs: vec![GraphKind::Experts, GraphKind::Bandit], lengths: vec![2, 3] };
        let mut env = ScheduledEnvironment::new(3, 12, schedule, LossSource::Constant { values: vec![0.0; 3] }, 0).unwrap();
        let ids: Vec<usize> = collect_rounds(&mut env).iter().map(|r| r.graph_id).collect();
        assert_eq!(ids, [0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn seeded_streams_are_reproducible() {
        let make = |seed| {
            let schedule = GraphSchedule::RandomPool { graphs: vec![GraphKind::Experts, GraphKind::Bandit] };
            let mut env =
                ScheduledEnvironment::new(5, 200, schedule, LossSource::Bernoulli { means: vec![0.5; 5] }, seed).unwrap();
            collect_rounds(&mut env)
        };
        assert_eq!(make(3), make(3));
        assert_ne!(make(3), make(4));
    }

    #[test]
    fn loss_stream_independent_of_graph_schedule() {
        let losses = LossSource::BernoulliGap { base: 0.5, gap: 0.1, best: 2 };
        let mut a = ScheduledEnvironment::new(4, 50, GraphSchedule::Fixed { graph: GraphKind::Bandit }, losses.clone(), 8).unwrap();
        let pool = GraphSchedule::RandomPool { graphs: vec![GraphKind::Experts, GraphKind::Bandit] };
        let mut b = ScheduledEnvironment::new(4, 50, pool, losses, 8).unwrap();
        let la: Vec<_> = collect_rounds(&mut a).into_iter().map(|r| r.losses).collect();
        let lb: Vec<_> = collect_rounds(&mut b).into_iter().map(|r| r.losses).collect();
        assert_eq!(la, lb);
    }

    #[test]
    fn rejects_bad_schedules() {
        let l = LossSource::Constant { values: vec![0.0; 3] };
        assert!(ScheduledEnvironment::new(3, 5, GraphSchedule::Periodic { graphs: vec![] }, l.clone(), 0).is_err());
        let seg = GraphSchedule::Segments { graphs: vec![GraphKind::Bandit], lengths: vec![0] };
        assert!(ScheduledEnvironment::new(3, 5, seg, l.clone(), 0).is_err());
        let bad = GraphSchedule::Fixed { graph: GraphKind::DisjointCliques { sizes: vec![1] } };
        assert!(ScheduledEnvironment::new(3, 5, bad, l, 0).is_err());
    }
}
