//! Environment side of the protocol: oblivious streams of feedback graphs
//! and loss vectors.

mod losses;
mod mtb;
mod replay;
mod sequence;

pub use losses::LossSource;
pub use mtb::{calibrated_epsilon, default_kl_constant, num_games, MtbEnvironment, MtbParams};
pub use replay::{write_replay, ReplayEnvironment, ReplayGraph, ReplayHeader};
pub use sequence::{GraphSchedule, ScheduledEnvironment};

use std::io::BufReader;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeedbackGraph, GraphKind};

/// One round of the environment's sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    /// 1-based round index.
    pub t: u64,
    /// Index into [`Environment::graphs`].
    pub graph_id: usize,
    pub losses: Vec<f64>,
}

pub trait Environment: Send {
    fn num_actions(&self) -> usize;

    fn horizon(&self) -> u64;

    /// Dictionary of every graph the stream can emit.
    fn graphs(&self) -> &[FeedbackGraph];

    /// Next round, or `None` after the horizon.
    fn next_round(&mut self) -> Option<Round>;
}

/// Drains the remaining rounds.
pub fn collect_rounds(env: &mut dyn Environment) -> Vec<Round> {
    std::iter::from_fn(|| env.next_round()).collect()
}

/// Serializable description of an environment. The horizon and the seed are
/// supplied when it is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    FixedAdversarial {
        k: usize,
        graph: GraphKind,
        losses: LossSource,
    },
    TimeVarying {
        k: usize,
        schedule: GraphSchedule,
        losses: LossSource,
    },
    MtbLowerBound {
        k: usize,
        alpha: usize,
        #[serde(default)]
        target: usize,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        epsilon_horizon: Option<u64>,
        #[serde(default)]
        c: Option<f64>,
    },
    /// A recorded replay file; the horizon is taken from the file.
    Replay { path: PathBuf },
}

impl EnvironmentSpec {
    pub fn num_actions(&self) -> Option<usize> {
        match self {
            EnvironmentSpec::FixedAdversarial { k, .. }
            | EnvironmentSpec::TimeVarying { k, .. }
            | EnvironmentSpec::MtbLowerBound { k, .. } => Some(*k),
            EnvironmentSpec::Replay { .. } => None,
        }
    }

    pub fn build(&self, horizon: u64, seed: u64) -> Result<Box<dyn Environment>> {
        Ok(match self {
            EnvironmentSpec::FixedAdversarial { k, graph, losses } => Box::new(ScheduledEnvironment::new(
                *k,
                horizon,
                GraphSchedule::Fixed { graph: graph.clone() },
                losses.clone(),
                seed,
            )?),
            EnvironmentSpec::TimeVarying { k, schedule, losses } => {
                Box::new(ScheduledEnvironment::new(*k, horizon, schedule.clone(), losses.clone(), seed)?)
            }
            EnvironmentSpec::MtbLowerBound { k, alpha, target, epsilon, epsilon_horizon, c } => {
                Box::new(MtbEnvironment::build(
                    MtbParams {
                        k: *k,
                        alpha: *alpha,
                        horizon,
                        target: *target,
                        epsilon: *epsilon,
                        epsilon_horizon: *epsilon_horizon,
                        c: *c,
                    },
                    seed,
                )?)
            }
            EnvironmentSpec::Replay { path } => {
                let file = std::fs::File::open(path)
                    .map_err(|e| Error::Config(format!("cannot open replay {}: {e}", path.display())))?;
                Box::new(ReplayEnvironment::from_reader(BufReader::new(file))?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{independence_number, IndependenceMode};

    #[test]
    fn constant_losses_uniform_play_regret() {
        // l(i) = i / K on the experts graph: uniform play loses avg - min per round.
        let k = 4;
        let values: Vec<f64> = (0..k).map(|i| i as f64 / k as f64).collect();
        let spec = EnvironmentSpec::FixedAdversarial {
            k,
            graph: GraphKind::Experts,
            losses: LossSource::Constant { values: values.clone() },
        };
        let rounds = collect_rounds(spec.build(100, 0).unwrap().as_mut());
        assert_eq!(rounds.len(), 100);
        let uniform_loss: f64 = rounds.iter().map(|r| r.losses.iter().sum::<f64>() / k as f64).sum();
        let best: f64 = (0..k).map(|i| rounds.iter().map(|r| r.losses[i]).sum::<f64>()).fold(f64::INFINITY, f64::min);
        assert!((uniform_loss - best - 100.0 * (0.375 - 0.0)).abs() < 1e-9);
    }

    #[test]
    fn alternating_average_alpha() {
        let spec = EnvironmentSpec::TimeVarying {
            k: 4,
            schedule: GraphSchedule::Periodic { graphs: vec![GraphKind::Experts, GraphKind::Bandit] },
            losses: LossSource::Bernoulli { means: vec![0.5; 4] },
        };
        let mut env = spec.build(10, 1).unwrap();
        let alphas: Vec<usize> = env
            .graphs()
            .iter()
            .map(|g| independence_number(g, IndependenceMode::Exact).unwrap().alpha)
            .collect();
        let rounds = collect_rounds(env.as_mut());
        let avg = rounds.iter().map(|r| alphas[r.graph_id] as f64).sum::<f64>() / rounds.len() as f64;
        assert_eq!(avg, 2.5);
    }

    #[test]
    fn spec_parses_from_toml_like_json() {
        let s: EnvironmentSpec = serde_json::from_str(
            r#"{"kind":"fixed_adversarial","k":3,"graph":{"kind":"bandit"},
                "losses":{"kind":"bernoulli_gap","base":0.5,"gap":0.1,"best":1}}"#,
        )
        .unwrap();
        assert_eq!(s.num_actions(), Some(3));
        assert!(s.build(5, 0).is_ok());
    }
}
