//! Multitask-bandit adversaries.
//!
//! With `M = floor(log_alpha K)`, the first `alpha^M` actions are identified
//! with digit vectors in `[alpha]^M`. Graph `G^i` links two actions iff they
//! agree on digit `i`, so it is a union of `alpha` self-looped cliques. Each
//! round one game `i` is drawn uniformly, base action `j` of that game
//! receives a Bernoulli loss with mean `1/2 - eps * 1{target(i) = j}`, and
//! every action inherits the loss of its digit in game `i`. Leftover actions
//! (when `alpha^M < K`) copy the all-zero digit vector, i.e. join action 0's
//! clique in every graph and share its loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Environment, Round};
use crate::error::{Error, Result};
use crate::graph::FeedbackGraph;

/// Default `c = 8 ln(4/3)`.
pub fn default_kl_constant() -> f64 {
    8.0 * (4.0f64 / 3.0).ln()
}

/// `min(1/4, (1/4) sqrt(2 M alpha / (c T)))`.
pub fn calibrated_epsilon(games: usize, alpha: usize, horizon: u64, c: f64) -> f64 {
    (0.25 * (2.0 * games as f64 * alpha as f64 / (c * horizon as f64)).sqrt()).min(0.25)
}

/// Largest `M` with `alpha^M <= K`.
pub fn num_games(k: usize, alpha: usize) -> usize {
    let mut m = 0;
    let mut pow = 1usize;
    while let Some(next) = pow.checked_mul(alpha) {
        if next > k {
            break;
        }
        pow = next;
        m += 1;
    }
    m
}

#[derive(Debug, Clone)]
pub struct MtbEnvironment {
    k: usize,
    alpha: usize,
    horizon: u64,
    epsilon: f64,
    c: f64,
    /// `digits[a][i]` = base action of `a` in game `i`.
    digits: Vec<Vec<usize>>,
    target: usize,
    graphs: Vec<FeedbackGraph>,
    round: u64,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtbParams {
    pub k: usize,
    pub alpha: usize,
    /// Rounds the stream emits.
    pub horizon: u64,
    /// Index of the favoured action; must be one of the first `alpha^M` actions.
    pub target: usize,
    /// Explicit gap; defaults to [`calibrated_epsilon`].
    pub epsilon: Option<f64>,
    /// Horizon used to calibrate the gap; defaults to `horizon`.
    pub epsilon_horizon: Option<u64>,
    pub c: Option<f64>,
}

impl MtbEnvironment {
    pub fn build(params: MtbParams, seed: u64) -> Result<Self> {
        let MtbParams { k, alpha, horizon, target, epsilon, epsilon_horizon, c } = params;
        if alpha < 2 || alpha > k {
            return Err(Error::InvalidParams(format!("need 2 <= alpha <= K, got alpha = {alpha}, K = {k}")));
        }
        if horizon == 0 {
            return Err(Error::InvalidParams("horizon must be at least 1".into()));
        }
        let games = num_games(k, alpha);
        let base = alpha.pow(games as u32);
        if target >= base {
            return Err(Error::InvalidParams(format!("target {target} must be below alpha^M = {base}")));
        }
        let c = c.unwrap_or_else(default_kl_constant);
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("constant c = {c} must be positive")));
        }
        let epsilon = match epsilon {
            Some(e) if (0.0..=0.25).contains(&e) => e,
            Some(e) => return Err(Error::InvalidParams(format!("epsilon {e} outside [0, 1/4]"))),
            None => calibrated_epsilon(games, alpha, epsilon_horizon.unwrap_or(horizon), c),
        };

        let digit_vector = |mut a: usize| {
            (0..games)
                .map(|_| {
                    let d = a % alpha;
                    a /= alpha;
                    d
                })
                .collect::<Vec<_>>()
        };
        let digits: Vec<Vec<usize>> = (0..k).map(|a| if a < base { digit_vector(a) } else { digit_vector(0) }).collect();
        let graphs = (0..games)
            .map(|i| {
                let edges = (0..k).flat_map(|a| (a..k).map(move |b| (a, b)));
                let edges: Vec<_> = edges.filter(|&(a, b)| digits[a][i] == digits[b][i]).collect();
                FeedbackGraph::from_edges(k, edges)
            })
            .collect();

        Ok(Self {
            k,
            alpha,
            horizon,
            epsilon,
            c,
            digits,
            target,
            graphs,
            round: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn games(&self) -> usize {
        self.graphs.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kl_constant(&self) -> f64 {
        self.c
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn digits(&self, action: usize) -> &[usize] {
        &self.digits[action]
    }

    /// True when `T >= alpha log_alpha(K) / (4 ln(4/3))`, so the calibrated gap is not clipped.
    pub fn horizon_meets_gap_precondition(&self) -> bool {
        let log_alpha_k = (self.k as f64).ln() / (self.alpha as f64).ln();
        self.horizon as f64 >= self.alpha as f64 * log_alpha_k / (4.0 * (4.0f64 / 3.0).ln())
    }

    /// `mu(j; G^i) = 1/2 - eps * 1{target(i) = j}`.
    pub fn base_mean(&self, game: usize, base_action: usize) -> f64 {
        if self.digits[self.target][game] == base_action { 0.5 - self.epsilon } else { 0.5 }
    }

    /// Expected loss of `action`, averaged over the uniformly drawn game.
    pub fn mean_loss(&self, action: usize) -> f64 {
        let m = self.games() as f64;
        (0..self.games()).map(|i| self.base_mean(i, self.digits[action][i])).sum::<f64>() / m
    }

    /// Expected per-round regret of uniform play against the target: `eps (1 - 1/alpha)`
    /// when `alpha^M = K`.
    pub fn uniform_regret_per_round(&self) -> f64 {
        let avg = (0..self.k).map(|a| self.mean_loss(a)).sum::<f64>() / self.k as f64;
        avg - self.mean_loss(self.target)
    }
}

impl Environment for MtbEnvironment {
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
        let game = self.rng.random_range(0..self.games());
        let base: Vec<f64> = (0..self.alpha)
            .map(|j| if self.rng.random::<f64>() < self.base_mean(game, j) { 1.0 } else { 0.0 })
            .collect();
        let losses = self.digits.iter().map(|d| base[d[game]]).collect();
        Some(Round { t: self.round, graph_id: game, losses })
    }
}
