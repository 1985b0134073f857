//! Doubling meta-learner for unknown, time-varying independence numbers.
//!
//! Epoch `r` runs q-FTRL with the shifted estimator tuned for `alpha = 2^r`.
//! After every round the learner adds `Bbar_t(q_r)^(1 / q_r)` to an
//! accumulator and restarts with `r + 1` once `accumulator / T > 2^(r + 1)`.

use serde::{Deserialize, Serialize};

use super::qftrl::QFtrlState;
use super::tuning::tune_epoch;
use crate::distribution::ActionDistribution;
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, RoundObservation};
use crate::graph::FeedbackGraph;

/// `Bbar(q) = sum_{i with self-loop} p(i)^(2 - q) / P(i)`.
pub fn variance_quantity(g: &FeedbackGraph, p: &ActionDistribution, q: f64) -> f64 {
    let probs = p.probs();
    (0..g.num_nodes())
        .filter(|&i| g.has_self_loop(i) && probs[i] > 0.0)
        .map(|i| probs[i].powf(2.0 - q) / g.neighborhood_prob(probs, i))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochInfo {
    pub epoch: u32,
    /// First round (1-based) of the epoch.
    pub start: u64,
    pub q: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingState {
    num_actions: usize,
    horizon: u64,
    max_epoch: u32,
    epoch: u32,
    epoch_start: u64,
    accumulator: f64,
    round: u64,
    inner: QFtrlState,
    history: Vec<EpochInfo>,
}

impl DoublingState {
    pub fn new(num_actions: usize, horizon: u64) -> Result<Self> {
        if num_actions == 0 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        let params = tune_epoch(num_actions, 0, horizon)?;
        Ok(Self {
            num_actions,
            horizon,
            max_epoch: num_actions.ilog2(),
            epoch: 0,
            epoch_start: 1,
            accumulator: 0.0,
            round: 0,
            inner: QFtrlState::new(num_actions, params, EstimatorKind::Shifted),
            history: vec![EpochInfo { epoch: 0, start: 1, q: params.q(), eta: params.eta() }],
        })
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn epoch_start(&self) -> u64 {
        self.epoch_start
    }

    pub fn accumulator(&self) -> f64 {
        self.accumulator
    }

    pub fn inner(&self) -> &QFtrlState {
        &self.inner
    }

    pub fn distribution(&self) -> &ActionDistribution {
        self.inner.distribution()
    }

    /// Epochs started so far, in order.
    pub fn history(&self) -> &[EpochInfo] {
        &self.history
    }

    pub fn restarts(&self) -> usize {
        self.history.len() - 1
    }

    /// One round: variance bookkeeping with the distribution that was
    /// played, the inner q-FTRL step, then the restart test.
    /// Returns `true` when the learner restarted.
    pub fn step(&mut self, obs: &RoundObservation<'_>) -> Result<bool> {
        if self.round >= self.horizon {
            return Err(Error::InvalidParams(format!("round {} exceeds horizon {}", self.round + 1, self.horizon)));
        }
        let q = self.inner.params().q();
        let bbar = variance_quantity(obs.graph(), self.inner.distribution(), q);
        self.accumulator += bbar.powf(1.0 / q);
        self.inner.step(obs)?;
        self.round += 1;

        let threshold = 2f64.powi(self.epoch as i32 + 1);
        if self.epoch < self.max_epoch && self.accumulator / self.horizon as f64 > threshold {
            self.epoch += 1;
            self.epoch_start = self.round + 1;
            self.accumulator = 0.0;
            let params = tune_epoch(self.num_actions, self.epoch, self.horizon)?;
            self.inner = QFtrlState::new(self.num_actions, params, EstimatorKind::Shifted);
            self.history.push(EpochInfo { epoch: self.epoch, start: self.epoch_start, q: params.q(), eta: params.eta() });
            return Ok(true);
        }
        Ok(false)
    }
}
