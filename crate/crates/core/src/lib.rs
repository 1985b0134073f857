//! Online learning with strongly observable undirected feedback graphs.
//!
//! The crate provides the q-Tsallis-entropy FTRL learner with closed-form
//! tunings for a known independence number, a doubling meta-learner for
//! unknown or time-varying graphs, both importance-weighted loss estimators,
//! the multitask-bandit adversary family, and an experiment harness.

pub mod distribution;
pub mod environments;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
pub mod learners;
pub mod tsallis;

pub use distribution::ActionDistribution;
pub use error::{Error, Result};
pub use estimators::{EstimatedLoss, EstimatorKind, RoundObservation};
pub use graph::{FeedbackGraph, GraphKind, IndependenceCertificate, IndependenceMode};
pub use harness::{RegretSummary, RoundRecord, RunConfig};
pub use learners::{build_learner, Learner, LearnerKind};
pub use tsallis::{ftrl_update, tsallis_entropy, TsallisParams};
