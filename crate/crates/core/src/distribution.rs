//! Points of the probability simplex over actions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum(p) - 1|` enforced at module boundaries.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A sampling distribution `p` over the `K` actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDistribution {
    probs: Vec<f64>,
}

impl ActionDistribution {
    /// Validates `probs` against the simplex tolerance.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        if let Some(i) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {} (must be finite and nonnegative)",
                probs[i]
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    /// Builds a distribution from a vector the caller already knows lies on the simplex.
    pub(crate) fn from_solver(probs: Vec<f64>) -> Self {
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-8);
        Self { probs }
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k >= 1, "uniform distribution needs at least one action");
        Self { probs: vec![1.0 / k as f64; k] }
    }

    /// Uniform over `support`, zero elsewhere.
    pub fn uniform_on(k: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut probs = vec![0.0; k];
        let w = 1.0 / support.len() as f64;
        for &v in support {
            if v >= k {
                return Err(Error::InvalidDistribution(format!("support node {v} out of range")));
            }
            probs[v] = w;
        }
        Self::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.probs
    }

    /// Draws an action by inverse CDF on a single uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // Rounding can leave `acc` slightly below one; fall back to the last
        // action with positive mass.
        self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// Expected loss `<p, losses>`.
    pub fn dot(&self, losses: &[f64]) -> f64 {
        self.probs.iter().zip(losses).map(|(p, l)| p * l).sum()
    }

    /// Shannon entropy in nats (diagnostic only).
    pub fn shannon_entropy(&self) -> f64 {
        -self.probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
    }
}

impl AsRef<[f64]> for ActionDistribution {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}
