//! The q-Tsallis entropy regulariser and the exact FTRL step over the simplex.
//!
//! The minimiser of `eta * <L, p> + psi_q(p)` has the closed form
//! `p(i) = (c / (eta * L(i) + lambda))^s` with `c = q / (1 - q)` and
//! `s = 1 / (1 - q)`, where `lambda` normalises `p`. With losses shifted so
//! that `min L = 0` the normaliser lies in `[c, c * K^(1-q)]`, and
//! `F(lambda) = (sum_i p(i))^(-1/s) - 1` is increasing and concave there, so
//! Newton's method started at the left end of the bracket climbs
//! monotonically to the root.

use serde::{Deserialize, Serialize};

use crate::distribution::ActionDistribution;
use crate::error::{Error, Result};

/// Largest admissible `q`; keeps `1 / (1 - q)` finite.
pub const Q_MAX: f64 = 1.0 - 1e-6;

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsallisParams {
    q: f64,
    eta: f64,
}

impl TsallisParams {
    pub fn new(q: f64, eta: f64) -> Result<Self> {
        if !(q > 0.0 && q <= Q_MAX) {
            return Err(Error::DomainError(q));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParams(format!("learning rate {eta} must be positive and finite")));
        }
        Ok(Self { q, eta })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// `psi_q(p) = (1 - sum_i p(i)^q) / (1 - q)`.
pub fn tsallis_entropy(p: &ActionDistribution, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::DomainError(q));
    }
    let s: f64 = p.probs().iter().map(|x| x.powf(q)).sum();
    Ok((1.0 - s) / (1.0 - q))
}

/// Result of one FTRL step.
#[derive(Debug, Clone, PartialEq)]
pub struct FtrlSolution {
    pub distribution: ActionDistribution,
    /// Multiplier of the simplex constraint for the unshifted losses.
    pub lambda: f64,
    pub iterations: usize,
}

/// `argmin_{p in simplex} eta * <cumulative_loss, p> + psi_q(p)`.
pub fn ftrl_update(cumulative_loss: &[f64], params: &TsallisParams) -> Result<FtrlSolution> {
    if cumulative_loss.is_empty() {
        return Err(Error::InvalidParams("empty loss vector".into()));
    }
    if let Some(i) = cumulative_loss.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }
    let (q, eta) = (params.q, params.eta);
    let k = cumulative_loss.len();
    let c = q / (1.0 - q);
    let s = 1.0 / (1.0 - q);
    let min = cumulative_loss.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = cumulative_loss.iter().map(|l| eta * (l - min)).collect();

    let mut probs = vec![0.0; k];
    // Fills `probs` at `lambda`; returns (sum p, sum p / (x + lambda)).
    let eval = |lambda: f64, probs: &mut [f64]| {
        let mut sum = 0.0;
        let mut weighted = 0.0;
        for (p, &x) in probs.iter_mut().zip(&shifted) {
            let d = x + lambda;
            *p = (c / d).powf(s);
            sum += *p;
            weighted += *p / d;
        }
        (sum, weighted)
    };

    let mut lo = c;
    let hi = c * (k as f64).powf(1.0 - q);
    let mut lambda = lo;
    let mut iterations = 0;
    loop {
        let (sum, weighted) = eval(lambda, &mut probs);
        let f = sum.powf(-1.0 / s) - 1.0;
        if f >= 0.0 {
            break;
        }
        lo = lambda;
        if iterations == MAX_ITERATIONS {
            return Err(Error::ConvergenceFailure { iterations, residual: (sum - 1.0).abs() });
        }
        iterations += 1;
        let slope = sum.powf(-1.0 / s - 1.0) * weighted;
        let mut next = lambda - f / slope;
        if !(next > lo && next <= hi) {
            next = 0.5 * (lo + hi);
        }
        if next - lambda <= 4.0 * f64::EPSILON * lambda {
            break;
        }
        lambda = next;
    }

    Ok(FtrlSolution {
        distribution: ActionDistribution::from_solver(probs),
        lambda: lambda - eta * min,
        iterations,
    })
}

/// `max_i |eta * L(i) - q / (1 - q) * p(i)^(q - 1) + lambda|`.
pub fn kkt_residual(cumulative_loss: &[f64], params: &TsallisParams, solution: &FtrlSolution) -> f64 {
    let (q, eta) = (params.q, params.eta);
    let c = q / (1.0 - q);
    cumulative_loss
        .iter()
        .zip(solution.distribution.probs())
        .map(|(l, p)| (eta * l - c * p.powf(q - 1.0) + solution.lambda).abs())
        .fold(0.0, f64::max)
}
