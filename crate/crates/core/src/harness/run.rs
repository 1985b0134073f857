use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environments::{collect_rounds, EnvironmentSpec, Round};
use crate::error::{Error, Result};
use crate::estimators::RoundObservation;
use crate::graph::{independence_number, IndependenceMethod, IndependenceMode};
use crate::learners::{build_learner, variance_quantity, EpochInfo, LearnerKind, TuningOverrides};

/// `4 sqrt(6e) (sqrt(pi) + sqrt(4 - 2 ln 2)) / ln 2`.
pub fn doubling_bound_constant() -> f64 {
    let ln2 = std::f64::consts::LN_2;
    4.0 * (6.0 * std::f64::consts::E).sqrt() * (std::f64::consts::PI.sqrt() + (4.0 - 2.0 * ln2).sqrt()) / ln2
}

/// `scale * sqrt(e alpha T (2 + ln(K / alpha)))`; `scale` is 2 with self-loops, 6 otherwise.
pub fn fixed_alpha_bound(scale: f64, k: usize, alpha: f64, horizon: u64) -> f64 {
    scale * (std::f64::consts::E * alpha * horizon as f64 * (2.0 + (k as f64 / alpha).ln())).sqrt()
}

/// `C sqrt(sum_t alpha_t (2 + ln(K / alpha_bar))) + log2(alpha_bar)`.
pub fn doubling_bound(k: usize, alphas: &[usize]) -> f64 {
    let total: f64 = alphas.iter().map(|&a| a as f64).sum();
    let avg = total / alphas.len() as f64;
    doubling_bound_constant() * (total * (2.0 + (k as f64 / avg).ln())).sqrt() + avg.log2()
}

/// Lower-bound constant `sqrt(alpha T log_alpha K) / (18 sqrt 2)`.
pub fn lower_bound_reference(k: usize, alpha: usize, horizon: u64) -> f64 {
    let log_alpha_k = (k as f64).ln() / (alpha as f64).ln();
    (alpha as f64 * horizon as f64 * log_alpha_k).sqrt() / (18.0 * 2f64.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub learner: LearnerKind,
    pub environment: EnvironmentSpec,
    /// Number of rounds `T`.
    pub horizon: u64,
    pub seeds: Vec<u64>,
    /// Independence number handed to the `qftrl_thm*` learners. When absent
    /// the harness uses the environment's average independence number.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub tuning: TuningOverrides,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon T must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-round trace entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: u64,
    pub action: usize,
    pub graph_id: usize,
    /// `l_t(I_t)`.
    pub loss: f64,
    /// `<p_t, l_t>`.
    pub expected_loss: f64,
    /// `Bbar_t(q)` at the distribution played, for learners with a `q`.
    pub bbar: Option<f64>,
    pub epoch: Option<u32>,
    /// Shannon entropy of `p_t`, in nats.
    pub entropy: f64,
    /// Full loss vector of the round, so regret can be recomputed from the trace.
    pub losses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretSummary {
    pub learner: LearnerKind,
    pub seed: u64,
    pub k: usize,
    pub horizon: u64,
    /// Average independence number over the played rounds.
    pub alpha_bar: f64,
    /// False when some graph exceeded the exact-mode limit and a greedy lower bound was used.
    pub alpha_exact: bool,
    pub q: Option<f64>,
    pub eta: Option<f64>,
    pub learner_loss: f64,
    pub expected_learner_loss: f64,
    pub best_action: usize,
    pub best_loss: f64,
    /// `learner_loss - best_loss`.
    pub regret: f64,
    /// `expected_learner_loss - best_loss`.
    pub expected_regret: f64,
    pub bound: Option<f64>,
    /// `regret / bound`.
    pub ratio: Option<f64>,
    pub restarts: Option<usize>,
}

/// Result of one seed: summary plus the doubling epoch log, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRun {
    pub summary: RegretSummary,
    pub epochs: Vec<EpochInfo>,
    /// Exact (or greedy lower-bound) independence number of every played round.
    pub alphas: Vec<usize>,
}

fn learner_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Runs one seed, passing every round record to `sink`.
pub fn run_seed(config: &RunConfig, seed: u64, sink: &mut dyn FnMut(&RoundRecord) -> Result<()>) -> Result<SeedRun> {
    config.validate()?;
    let mut env = config.environment.build(config.horizon, seed)?;
    if env.horizon() != config.horizon {
        return Err(Error::Config(format!(
            "environment provides {} rounds but T = {}",
            env.horizon(),
            config.horizon
        )));
    }
    let k = env.num_actions();
    let graphs = env.graphs().to_vec();
    let mut exact = true;
    let graph_alpha = graphs
        .iter()
        .map(|g| {
            let cert = independence_number(g, IndependenceMode::Exact)
                .or_else(|_| independence_number(g, IndependenceMode::Greedy))?;
            exact &= cert.method == IndependenceMethod::Exact;
            Ok(cert.alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    let rounds: Vec<Round> = collect_rounds(env.as_mut());
    let alphas: Vec<usize> = rounds.iter().map(|r| graph_alpha[r.graph_id]).collect();
    let alpha_bar = alphas.iter().sum::<usize>() as f64 / alphas.len() as f64;

    let tuning_alpha = config.alpha.or(Some(alpha_bar));
    let mut learner =
        build_learner(config.learner, k, config.horizon, tuning_alpha, config.tuning, learner_seed(seed))?;
    let initial = learner.params();

    let mut totals = vec![0.0; k];
    let mut learner_loss = 0.0;
    let mut expected_learner_loss = 0.0;
    for round in &rounds {
        let graph = &graphs[round.graph_id];
        let p = learner.distribution().clone();
        let bbar = learner.params().map(|params| variance_quantity(graph, &p, params.q()));
        let epoch = learner.epoch();
        let action = learner.select_action();
        RoundObservation::reveal(action, graph, &round.losses)
            .and_then(|obs| learner.update(&obs))
            .map_err(|e| Error::Round { round: round.t as usize, source: Box::new(e) })?;

        let loss = round.losses[action];
        let expected_loss = p.dot(&round.losses);
        learner_loss += loss;
        expected_learner_loss += expected_loss;
        for (tot, l) in totals.iter_mut().zip(&round.losses) {
            *tot += l;
        }
        sink(&RoundRecord {
            t: round.t,
            action,
            graph_id: round.graph_id,
            loss,
            expected_loss,
            bbar,
            epoch,
            entropy: p.shannon_entropy(),
            losses: round.losses.clone(),
        })?;
    }

    let (best_action, best_loss) = best_fixed_action(&totals);
    let bound = match config.learner {
        LearnerKind::QftrlThm1 => Some(fixed_alpha_bound(2.0, k, tuning_alpha.unwrap_or(alpha_bar), config.horizon)),
        LearnerKind::QftrlThm2 => Some(fixed_alpha_bound(6.0, k, tuning_alpha.unwrap_or(alpha_bar), config.horizon)),
        LearnerKind::Doubling => Some(doubling_bound(k, &alphas)),
        LearnerKind::UniformBaseline => None,
    };
    let regret = learner_loss - best_loss;
    let epochs = learner.epoch_history();
    let summary = RegretSummary {
        learner: config.learner,
        seed,
        k,
        horizon: config.horizon,
        alpha_bar,
        alpha_exact: exact,
        q: initial.map(|p| p.q()),
        eta: initial.map(|p| p.eta()),
        learner_loss,
        expected_learner_loss,
        best_action,
        best_loss,
        regret,
        expected_regret: expected_learner_loss - best_loss,
        bound,
        ratio: bound.map(|b| regret / b),
        restarts: (config.learner == LearnerKind::Doubling).then(|| epochs.len().saturating_sub(1)),
    };
    Ok(SeedRun { summary, epochs, alphas })
}

/// Lowest-index minimiser of the cumulative losses.
pub fn best_fixed_action(totals: &[f64]) -> (usize, f64) {
    totals
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, l)| if l < best.1 { (i, l) } else { best })
}

/// Runs every seed in parallel, without keeping round traces.
pub fn run(config: &RunConfig) -> Result<Vec<SeedRun>> {
    config.validate()?;
    config.seeds.par_iter().map(|&seed| run_seed(config, seed, &mut |_| Ok(()))).collect()
}

/// Runs one seed and writes its trace as JSON lines.
pub fn run_seed_jsonl<W: Write>(config: &RunConfig, seed: u64, out: &mut W) -> Result<SeedRun> {
    let result = run_seed(config, seed, &mut |rec| {
        serde_json::to_writer(&mut *out, rec)?;
        out.write_all(b"\n")?;
        Ok(())
    })?;
    out.flush()?;
    Ok(result)
}

/// Recomputes `(learner_loss, best_loss, regret)` from a trace alone.
pub fn regret_from_records(records: &[RoundRecord]) -> (f64, f64, f64) {
    let k = records.first().map_or(0, |r| r.losses.len());
    let mut totals = vec![0.0; k];
    let mut learner = 0.0;
    for r in records {
        learner += r.loss;
        for (t, l) in totals.iter_mut().zip(&r.losses) {
            *t += l;
        }
    }
    let best = best_fixed_action(&totals).1;
    (learner, best, learner - best)
}

/// Mean and standard error.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn write_summaries_csv<W: Write>(summaries: &[RegretSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::LossSource;
    use crate::graph::GraphKind;

    fn config(learner: LearnerKind, horizon: u64) -> RunConfig {
        RunConfig {
            learner,
            environment: EnvironmentSpec::FixedAdversarial {
                k: 4,
                graph: GraphKind::DisjointCliques { sizes: vec![2, 2] },
                losses: LossSource::BernoulliGap { base: 0.5, gap: 0.2, best: 3 },
            },
            horizon,
            seeds: vec![1, 2],
            alpha: None,
            tuning: TuningOverrides::default(),
        }
    }

    #[test]
    fn constant_values() {
        assert!((doubling_bound_constant() - 78.985_642_531_039_69).abs() < 1e-10);
        // 2 sqrt(e * 1 * 100 * (2 + ln 4))
        let b = fixed_alpha_bound(2.0, 4, 1.0, 100);
        assert!((b - 2.0 * (std::f64::consts::E * 100.0 * (2.0 + 4f64.ln())).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_round_regret_is_bounded() {
        for learner in [LearnerKind::QftrlThm1, LearnerKind::UniformBaseline, LearnerKind::Doubling] {
            for s in run(&config(learner, 1)).unwrap() {
                assert!((-1.0..=1.0).contains(&s.summary.regret));
            }
        }
    }

    #[test]
    fn rejects_empty_seeds_and_zero_horizon() {
        let mut c = config(LearnerKind::QftrlThm1, 10);
        c.seeds.clear();
        assert!(matches!(run(&c), Err(Error::Config(_))));
        assert!(matches!(run(&config(LearnerKind::QftrlThm1, 0)), Err(Error::Config(_))));
    }

    #[test]
    fn trace_reproduces_regret() {
        let c = config(LearnerKind::QftrlThm2, 300);
        let mut records = Vec::new();
        let run = run_seed(&c, 5, &mut |r| {
            records.push(r.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(records.len(), 300);
        assert!(records.windows(2).all(|w| w[0].t + 1 == w[1].t));
        let (learner, best, regret) = regret_from_records(&records);
        assert_eq!(learner, run.summary.learner_loss);
        assert_eq!(best, run.summary.best_loss);
        assert_eq!(regret, run.summary.regret);
        assert_eq!(run.summary.alpha_bar, 2.0);
    }

    #[test]
    fn jsonl_is_deterministic() {
        let c = config(LearnerKind::Doubling, 200);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        run_seed_jsonl(&c, 9, &mut a).unwrap();
        run_seed_jsonl(&c, 9, &mut b).unwrap();
        assert_eq!(a, b);
        let first: serde_json::Value = serde_json::from_slice(a.split(|&c| c == b'\n').next().unwrap()).unwrap();
        assert_eq!(first["t"], 1);
        assert_eq!(first["epoch"], 0);
    }

    #[test]
    fn summaries_serialize_to_csv() {
        let runs = run(&config(LearnerKind::UniformBaseline, 20)).unwrap();
        let summaries: Vec<_> = runs.into_iter().map(|r| r.summary).collect();
        let mut buf = Vec::new();
        write_summaries_csv(&summaries, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("learner,seed,k,horizon,alpha_bar"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn mean_and_stderr_basic() {
        let (m, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (1.666_666_666_666_666_7f64 / 4.0).sqrt()).abs() < 1e-15);
    }
}
