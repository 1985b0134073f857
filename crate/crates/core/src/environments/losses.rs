use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How true losses are drawn each round. All sources emit values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSource {
    /// The same loss vector every round.
    Constant { values: Vec<f64> },
    /// Independent Bernoulli draws with fixed means.
    Bernoulli { means: Vec<f64> },
    /// Bernoulli(`base`) for every action except `best`, which uses `base - gap`.
    BernoulliGap { base: f64, gap: f64, best: usize },
    /// Like `BernoulliGap`, but the favoured action advances by one every `period` rounds.
    PiecewiseBest { base: f64, gap: f64, period: u64 },
    /// Bernoulli with means `0.5 + amplitude * sin(2 pi ((t - 1) / period + i / K))`.
    ShiftingMeans { amplitude: f64, period: u64 },
}

impl LossSource {
    pub(crate) fn validate(&self, k: usize) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let ok = match self {
            LossSource::Constant { values } => values.len() == k && values.iter().all(|&v| unit(v)),
            LossSource::Bernoulli { means } => means.len() == k && means.iter().all(|&v| unit(v)),
            LossSource::BernoulliGap { base, gap, best } => *best < k && unit(*base) && unit(base - gap),
            LossSource::PiecewiseBest { base, gap, period } => *period > 0 && unit(*base) && unit(base - gap),
            LossSource::ShiftingMeans { amplitude, period } => *period > 0 && (0.0..=0.5).contains(amplitude),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("loss source {self:?} is inconsistent with K = {k}")))
        }
    }

    /// Expected loss of action `i` at round `t` (1-based).
    pub fn mean(&self, k: usize, t: u64, i: usize) -> f64 {
        match self {
            LossSource::Constant { values } => values[i],
            LossSource::Bernoulli { means } => means[i],
            LossSource::BernoulliGap { base, gap, best } => if i == *best { base - gap } else { *base },
            LossSource::PiecewiseBest { base, gap, period } => {
                let best = ((t - 1) / period) as usize % k;
                if i == best { base - gap } else { *base }
            }
            LossSource::ShiftingMeans { amplitude, period } => {
                let phase = (t - 1) as f64 / *period as f64 + i as f64 / k as f64;
                0.5 + amplitude * (2.0 * std::f64::consts::PI * phase).sin()
            }
        }
    }

    pub(crate) fn draw(&self, k: usize, t: u64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            LossSource::Constant { values } => values.clone(),
            _ => (0..k)
                .map(|i| {
                    let m = self.mean(k, t, i);
                    if rng.random::<f64>() < m { 1.0 } else { 0.0 }
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn validation() {
        assert!(LossSource::Constant { values: vec![0.1, 0.2] }.validate(2).is_ok());
        assert!(LossSource::Constant { values: vec![0.1, 1.2] }.validate(2).is_err());
        assert!(LossSource::Bernoulli { means: vec![0.5] }.validate(2).is_err());
        assert!(LossSource::BernoulliGap { base: 0.5, gap: 0.1, best: 2 }.validate(2).is_err());
        assert!(LossSource::BernoulliGap { base: 0.05, gap: 0.1, best: 0 }.validate(2).is_err());
        assert!(LossSource::PiecewiseBest { base: 0.5, gap: 0.1, period: 0 }.validate(2).is_err());
        assert!(LossSource::ShiftingMeans { amplitude: 0.6, period: 10 }.validate(2).is_err());
    }

    #[test]
    fn piecewise_best_rotates() {
        let s = LossSource::PiecewiseBest { base: 0.6, gap: 0.2, period: 3 };
        let best_at = |t| (0..4).find(|&i| s.mean(4, t, i) < 0.5).unwrap();
        assert_eq!([1, 3, 4, 6, 7, 12, 13].map(best_at), [0, 0, 1, 1, 2, 3, 0]);
    }

    #[test]
    fn draws_are_binary_and_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = LossSource::ShiftingMeans { amplitude: 0.5, period: 7 };
        for t in 1..100 {
            for v in s.draw(5, t, &mut rng) {
                assert!(v == 0.0 || v == 1.0);
            }
        }
    }
}
