use crate::distribution::ActionDistribution;
use crate::error::Result;
use crate::estimators::{estimate, EstimatorKind, RoundObservation};
use crate::tsallis::{ftrl_update, TsallisParams};

/// State of one q-FTRL instance: tuning, estimator and cumulative estimated loss.
#[derive(Debug, Clone, PartialEq)]
pub struct QFtrlState {
    params: TsallisParams,
    estimator: EstimatorKind,
    cumulative: Vec<f64>,
    current: ActionDistribution,
    rounds: u64,
}

impl QFtrlState {
    /// Fresh instance; plays the uniform distribution first.
    pub fn new(num_actions: usize, params: TsallisParams, estimator: EstimatorKind) -> Self {
        Self {
            params,
            estimator,
            cumulative: vec![0.0; num_actions],
            current: ActionDistribution::uniform(num_actions),
            rounds: 0,
        }
    }

    pub fn params(&self) -> TsallisParams {
        self.params
    }

    pub fn estimator(&self) -> EstimatorKind {
        self.estimator
    }

    /// Distribution used for the next round.
    pub fn distribution(&self) -> &ActionDistribution {
        &self.current
    }

    pub fn cumulative_loss(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Estimates this round's losses, accumulates them and moves to the
    /// regularised leader. Returns the new distribution.
    pub fn step(&mut self, obs: &RoundObservation<'_>) -> Result<&ActionDistribution> {
        let est = estimate(self.estimator, obs, &self.current)?;
        for (c, v) in self.cumulative.iter_mut().zip(&est.values) {
            *c += v;
        }
        self.current = ftrl_update(&self.cumulative, &self.params)?.distribution;
        self.rounds += 1;
        Ok(&self.current)
    }
}
