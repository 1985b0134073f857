//! Closed-form `(q, eta)` tunings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsallis::TsallisParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningVariant {
    /// All graphs have self-loops; basic estimator.
    SelfLoops,
    /// General strongly observable graphs; shifted estimator, `eta / 3`.
    General,
    /// Epoch tuning of the doubling learner: `alpha_guess = 2^r` and `11 T` in the rate.
    DoublingEpoch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningInputs {
    pub num_actions: usize,
    /// Independence number, or its guess; `1 <= alpha_guess <= K`.
    pub alpha_guess: f64,
    pub horizon: u64,
    pub variant: TuningVariant,
}

/// `q = (1 + ln(K/a) / (sqrt(ln(K/a)^2 + 4) + 2)) / 2`, which lies in `[1/2, 1)`.
pub fn tuned_q(num_actions: usize, alpha: f64) -> f64 {
    let log_ratio = (num_actions as f64 / alpha).ln();
    0.5 * (1.0 + log_ratio / ((log_ratio * log_ratio + 4.0).sqrt() + 2.0))
}

pub fn tune(inputs: &TuningInputs) -> Result<TsallisParams> {
    let TuningInputs { num_actions, alpha_guess, horizon, variant } = *inputs;
    let k = num_actions as f64;
    if num_actions == 0 {
        return Err(Error::InvalidParams("K must be at least 1".into()));
    }
    if !(alpha_guess >= 1.0 && alpha_guess <= k) {
        return Err(Error::InvalidParams(format!("alpha guess {alpha_guess} outside [1, {num_actions}]")));
    }
    if horizon == 0 {
        return Err(Error::InvalidParams("horizon must be at least 1".into()));
    }
    let q = tuned_q(num_actions, alpha_guess);
    let t = horizon as f64;
    let base = 2.0 * q * k.powf(1.0 - q) / ((1.0 - q) * alpha_guess.powf(q));
    let eta = match variant {
        TuningVariant::SelfLoops => (base / t).sqrt(),
        TuningVariant::General => (base / t).sqrt() / 3.0,
        TuningVariant::DoublingEpoch => (base / (11.0 * t)).sqrt(),
    };
    TsallisParams::new(q, eta)
}

/// Parameters of epoch `r` of the doubling learner.
pub fn tune_epoch(num_actions: usize, epoch: u32, horizon: u64) -> Result<TsallisParams> {
    tune(&TuningInputs {
        num_actions,
        alpha_guess: 2f64.powi(epoch as i32),
        horizon,
        variant: TuningVariant::DoublingEpoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(k: usize, alpha: f64, t: u64, variant: TuningVariant) -> TuningInputs {
        TuningInputs { num_actions: k, alpha_guess: alpha, horizon: t, variant }
    }

    #[test]
    fn bandit_case_gives_one_half() {
        for k in [1, 2, 7, 64] {
            let p = tune(&inputs(k, k as f64, 100, TuningVariant::SelfLoops)).unwrap();
            assert_eq!(p.q(), 0.5);
            // eta = sqrt(2 * 0.5 * K^0.5 / (T * 0.5 * K^0.5)) = sqrt(2 / T)
            assert!((p.eta() - (2.0f64 / 100.0).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn k8_alpha2() {
        // Evaluated independently: 0.6563439089607518.
        let q = tune(&inputs(8, 2.0, 10, TuningVariant::SelfLoops)).unwrap().q();
        assert!((q - 0.656_344).abs() < 1e-6, "{q}");
    }

    #[test]
    fn general_variant_is_a_third() {
        for (k, a, t) in [(8, 2.0, 1000), (16, 1.0, 20_000), (5, 5.0, 1)] {
            let s = tune(&inputs(k, a, t, TuningVariant::SelfLoops)).unwrap();
            let g = tune(&inputs(k, a, t, TuningVariant::General)).unwrap();
            assert_eq!(s.q(), g.q());
            assert!((g.eta() - s.eta() / 3.0).abs() <= 1e-15 * s.eta());
        }
    }

    #[test]
    fn doubling_epoch_schedule() {
        let (k, t) = (8usize, 20_000u64);
        for r in 0..=3u32 {
            let p = tune_epoch(k, r, t).unwrap();
            let a = 2f64.powi(r as i32);
            let q = 0.5 * (1.0 + (8.0 / a).ln() / (((8.0 / a).ln().powi(2) + 4.0).sqrt() + 2.0));
            let eta = (2.0 * q * 8f64.powf(1.0 - q) / (11.0 * t as f64 * (1.0 - q) * a.powf(q))).sqrt();
            assert_eq!(p.q(), q);
            assert!((p.eta() - eta).abs() <= 1e-15 * eta);
        }
        assert!(tune_epoch(8, 4, t).is_err());
    }

    #[test]
    fn q_stays_in_range() {
        for k in [1usize, 2, 10, 1000, 1_000_000] {
            for a in [1.0, (k as f64).sqrt(), k as f64] {
                let q = tuned_q(k, a);
                assert!((0.5..1.0).contains(&q));
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(tune(&inputs(4, 0.5, 10, TuningVariant::SelfLoops)).is_err());
        assert!(tune(&inputs(4, 5.0, 10, TuningVariant::SelfLoops)).is_err());
        assert!(tune(&inputs(4, 2.0, 0, TuningVariant::SelfLoops)).is_err());
        assert!(tune(&inputs(0, 1.0, 10, TuningVariant::SelfLoops)).is_err());
    }
}
