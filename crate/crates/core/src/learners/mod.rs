//! Learners driven by the protocol loop.

mod doubling;
mod qftrl;
mod tuning;

pub use doubling::{variance_quantity, DoublingState, EpochInfo};
pub use qftrl::QFtrlState;
pub use tuning::{tune, tune_epoch, tuned_q, TuningInputs, TuningVariant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::ActionDistribution;
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, RoundObservation};
use crate::tsallis::TsallisParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    /// q-FTRL, basic estimator, tuned with a known independence number.
    QftrlThm1,
    /// q-FTRL, shifted estimator, tuned with a known independence number and `eta / 3`.
    QftrlThm2,
    /// Doubling meta-learner; sees only `K` and `T`.
    Doubling,
    UniformBaseline,
}

impl LearnerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LearnerKind::QftrlThm1 => "qftrl_thm1",
            LearnerKind::QftrlThm2 => "qftrl_thm2",
            LearnerKind::Doubling => "doubling",
            LearnerKind::UniformBaseline => "uniform_baseline",
        }
    }

    pub fn needs_alpha(&self) -> bool {
        matches!(self, LearnerKind::QftrlThm1 | LearnerKind::QftrlThm2)
    }
}

impl std::fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qftrl_thm1" => Ok(LearnerKind::QftrlThm1),
            "qftrl_thm2" => Ok(LearnerKind::QftrlThm2),
            "doubling" => Ok(LearnerKind::Doubling),
            "uniform_baseline" => Ok(LearnerKind::UniformBaseline),
            other => Err(Error::Config(format!("unknown learner `{other}`"))),
        }
    }
}

/// A learner in the protocol loop. Each learner owns its sampling stream.
pub trait Learner: Send {
    fn num_actions(&self) -> usize;

    /// Distribution for the upcoming round.
    fn distribution(&self) -> &ActionDistribution;

    /// Draws `I_t` from [`Learner::distribution`].
    fn select_action(&mut self) -> usize;

    fn update(&mut self, obs: &RoundObservation<'_>) -> Result<()>;

    /// Regulariser parameters currently in force, if any.
    fn params(&self) -> Option<TsallisParams>;

    /// Doubling epoch index, if the learner has epochs.
    fn epoch(&self) -> Option<u32> {
        None
    }

    fn epoch_history(&self) -> Vec<EpochInfo> {
        Vec::new()
    }
}

pub struct QFtrlLearner {
    state: QFtrlState,
    rng: ChaCha8Rng,
}

impl QFtrlLearner {
    pub fn new(num_actions: usize, params: TsallisParams, estimator: EstimatorKind, seed: u64) -> Self {
        Self { state: QFtrlState::new(num_actions, params, estimator), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn state(&self) -> &QFtrlState {
        &self.state
    }
}

impl Learner for QFtrlLearner {
    fn num_actions(&self) -> usize {
        self.state.cumulative_loss().len()
    }

    fn distribution(&self) -> &ActionDistribution {
        self.state.distribution()
    }

    fn select_action(&mut self) -> usize {
        self.state.distribution().sample(&mut self.rng)
    }

    fn update(&mut self, obs: &RoundObservation<'_>) -> Result<()> {
        self.state.step(obs).map(|_| ())
    }

    fn params(&self) -> Option<TsallisParams> {
        Some(self.state.params())
    }
}

pub struct DoublingLearner {
    state: DoublingState,
    rng: ChaCha8Rng,
}

impl DoublingLearner {
    pub fn new(num_actions: usize, horizon: u64, seed: u64) -> Result<Self> {
        Ok(Self { state: DoublingState::new(num_actions, horizon)?, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn state(&self) -> &DoublingState {
        &self.state
    }
}

impl Learner for DoublingLearner {
    fn num_actions(&self) -> usize {
        self.state.distribution().len()
    }

    fn distribution(&self) -> &ActionDistribution {
        self.state.distribution()
    }

    fn select_action(&mut self) -> usize {
        self.state.distribution().sample(&mut self.rng)
    }

    fn update(&mut self, obs: &RoundObservation<'_>) -> Result<()> {
        self.state.step(obs).map(|_| ())
    }

    fn params(&self) -> Option<TsallisParams> {
        Some(self.state.inner().params())
    }

    fn epoch(&self) -> Option<u32> {
        Some(self.state.epoch())
    }

    fn epoch_history(&self) -> Vec<EpochInfo> {
        self.state.history().to_vec()
    }
}

/// Plays uniformly at random and ignores feedback.
pub struct UniformLearner {
    uniform: ActionDistribution,
    rng: ChaCha8Rng,
}

impl UniformLearner {
    pub fn new(num_actions: usize, seed: u64) -> Self {
        Self { uniform: ActionDistribution::uniform(num_actions), rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Learner for UniformLearner {
    fn num_actions(&self) -> usize {
        self.uniform.len()
    }

    fn distribution(&self) -> &ActionDistribution {
        &self.uniform
    }

    fn select_action(&mut self) -> usize {
        self.uniform.sample(&mut self.rng)
    }

    fn update(&mut self, _obs: &RoundObservation<'_>) -> Result<()> {
        Ok(())
    }

    fn params(&self) -> Option<TsallisParams> {
        None
    }
}

/// Explicit `(q, eta)` replacing the closed-form tuning.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TuningOverrides {
    pub q: Option<f64>,
    pub eta: Option<f64>,
}

/// Builds a learner. `alpha` is consulted only by the kinds whose tuning
/// needs it; the doubling learner receives `K` and `T` alone.
pub fn build_learner(
    kind: LearnerKind,
    num_actions: usize,
    horizon: u64,
    alpha: Option<f64>,
    overrides: TuningOverrides,
    seed: u64,
) -> Result<Box<dyn Learner>> {
    let tuned = |variant: TuningVariant| -> Result<TsallisParams> {
        let alpha = alpha.ok_or_else(|| Error::Config(format!("learner {kind} needs the independence number")))?;
        let base = tune(&TuningInputs { num_actions, alpha_guess: alpha, horizon, variant })?;
        TsallisParams::new(overrides.q.unwrap_or(base.q()), overrides.eta.unwrap_or(base.eta()))
    };
    Ok(match kind {
        LearnerKind::QftrlThm1 => {
            Box::new(QFtrlLearner::new(num_actions, tuned(TuningVariant::SelfLoops)?, EstimatorKind::Basic, seed))
        }
        LearnerKind::QftrlThm2 => {
            Box::new(QFtrlLearner::new(num_actions, tuned(TuningVariant::General)?, EstimatorKind::Shifted, seed))
        }
        LearnerKind::Doubling => Box::new(DoublingLearner::new(num_actions, horizon, seed)?),
        LearnerKind::UniformBaseline => Box::new(UniformLearner::new(num_actions, seed)),
    })
}
