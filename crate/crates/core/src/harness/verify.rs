//! Invariant suites run by `verify`. Each check reports the worst value it
//! observed next to the threshold it was held to.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::run::{run_seed, RunConfig};
use crate::distribution::ActionDistribution;
use crate::environments::{EnvironmentSpec, GraphSchedule, LossSource};
use crate::error::{Error, Result};
use crate::estimators::{estimate_basic, estimate_shifted, shifted_node, RoundObservation};
use crate::graph::{
    independence_number, is_independent_set, variance_certificate, FeedbackGraph, GraphKind, IndependenceMode,
};
use crate::learners::{tune_epoch, LearnerKind, TuningOverrides};
use crate::tsallis::{ftrl_update, kkt_residual, TsallisParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemma1,
    Estimators,
    Solver,
    Doubling,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma1" => Ok(Suite::Lemma1),
            "estimators" => Ok(Suite::Estimators),
            "solver" => Ok(Suite::Solver),
            "doubling" => Ok(Suite::Doubling),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown verification suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyBudget {
    pub seed: u64,
    /// Enumerate every self-looped graph on up to this many nodes.
    pub lemma1_max_k: usize,
    pub lemma1_points: usize,
    pub lemma1_exponents: Vec<f64>,
    pub estimator_instances: usize,
    pub estimator_max_k: usize,
    pub solver_instances: usize,
    pub solver_max_k: usize,
    pub solver_qs: Vec<f64>,
    pub doubling_horizon: u64,
    pub doubling_seeds: usize,
}

impl Default for VerifyBudget {
    fn default() -> Self {
        Self {
            seed: 0,
            lemma1_max_k: 6,
            lemma1_points: 200,
            lemma1_exponents: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            estimator_instances: 1000,
            estimator_max_k: 12,
            solver_instances: 1000,
            solver_max_k: 16,
            solver_qs: vec![0.5, 0.66, 0.9],
            doubling_horizon: 5000,
            doubling_seeds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub check: String,
    pub passed: bool,
    pub cases: u64,
    /// Worst observed statistic: a violation amount (<= threshold passes) or
    /// a slack (>= threshold passes), as named by `kind`.
    pub worst: f64,
    pub threshold: f64,
    pub kind: CheckKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `worst` is an error that must stay at or below `threshold`.
    MaxError,
    /// `worst` is a slack that must stay at or above `threshold`.
    MinSlack,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Tracker {
    suite: Suite,
    check: &'static str,
    kind: CheckKind,
    threshold: f64,
    cases: u64,
    worst: f64,
}

impl Tracker {
    fn max_error(suite: Suite, check: &'static str, threshold: f64) -> Self {
        Self { suite, check, kind: CheckKind::MaxError, threshold, cases: 0, worst: 0.0 }
    }

    fn min_slack(suite: Suite, check: &'static str, threshold: f64) -> Self {
        Self { suite, check, kind: CheckKind::MinSlack, threshold, cases: 0, worst: f64::INFINITY }
    }

    fn observe(&mut self, x: f64) {
        self.cases += 1;
        self.worst = match self.kind {
            CheckKind::MaxError => {
                if x.is_nan() || x > self.worst { x } else { self.worst }
            }
            CheckKind::MinSlack => {
                if x.is_nan() || x < self.worst { x } else { self.worst }
            }
        };
    }

    fn finish(self) -> CheckOutcome {
        let passed = match self.kind {
            CheckKind::MaxError => self.worst <= self.threshold,
            CheckKind::MinSlack => self.worst >= self.threshold,
        };
        CheckOutcome {
            suite: self.suite,
            check: self.check.to_string(),
            passed,
            cases: self.cases,
            worst: self.worst,
            threshold: self.threshold,
            kind: self.kind,
        }
    }
}

pub fn verify(suite: Suite, budget: &VerifyBudget) -> VerifyReport {
    let mut report = VerifyReport::default();
    let suites = match suite {
        Suite::All => vec![Suite::Lemma1, Suite::Estimators, Suite::Solver, Suite::Doubling],
        s => vec![s],
    };
    for s in suites {
        let checks = match s {
            Suite::Lemma1 => verify_lemma1(budget),
            Suite::Estimators => verify_estimators(budget),
            Suite::Solver => verify_solver(budget),
            Suite::Doubling => verify_doubling(budget),
            Suite::All => unreachable!(),
        };
        // Errors are report entries, not aborts.
        report.checks.extend(checks.unwrap_or_else(|e| {
            vec![CheckOutcome {
                suite: s,
                check: format!("suite ran without error ({e})"),
                passed: false,
                cases: 0,
                worst: 1.0,
                threshold: 0.0,
                kind: CheckKind::MaxError,
            }]
        }));
    }
    report
}

/// Every graph on `k` nodes with all self-loops, one per subset of the
/// `k (k - 1) / 2` possible edges.
pub fn self_looped_graphs(k: usize) -> impl Iterator<Item = FeedbackGraph> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges = (0..k).map(|i| (i, i)).chain(pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e));
        FeedbackGraph::from_edges(k, edges)
    })
}

/// Dirichlet(1) draw; with `sparse`, a random subset of entries (never all) is zeroed first.
pub fn random_simplex_point(rng: &mut ChaCha8Rng, k: usize, sparse: bool) -> ActionDistribution {
    let mut w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    if sparse && k > 1 {
        let keep = rng.random_range(0..k);
        for (i, x) in w.iter_mut().enumerate() {
            if i != keep && rng.random_bool(0.5) {
                *x = 0.0;
            }
        }
    }
    let s: f64 = w.iter().sum();
    ActionDistribution::new(w.into_iter().map(|x| x / s).collect()).expect("normalised weights")
}

fn verify_lemma1(budget: &VerifyBudget) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut bound = Tracker::min_slack(Suite::Lemma1, "value <= alpha^(1-b) + 1e-9", -1e-9);
    let mut greedy = Tracker::min_slack(Suite::Lemma1, "value <= sum_{greedy set} p^b", -1e-12);
    let mut indep = Tracker::max_error(Suite::Lemma1, "greedy set is independent", 0.0);
    let mut tight = Tracker::max_error(Suite::Lemma1, "equality at uniform p on a maximum independent set", 1e-12);
    for k in 1..=budget.lemma1_max_k {
        for g in self_looped_graphs(k) {
            let mis = independence_number(&g, IndependenceMode::Exact)?;
            let alpha = mis.alpha as f64;
            let all: Vec<usize> = (0..k).collect();
            let star = ActionDistribution::uniform_on(k, &mis.witness_set)?;
            for &b in &budget.lemma1_exponents {
                let c = variance_certificate(&g, &star, b, &all)?;
                tight.observe((c.value - alpha.powf(1.0 - b)).abs());
            }
            for n in 0..budget.lemma1_points {
                let p = random_simplex_point(&mut rng, k, n % 4 == 3);
                // A random nonempty subset alongside the full node set.
                let mask = rng.random_range(1u64..1 << k);
                let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
                for &b in &budget.lemma1_exponents {
                    for u in [&all, &subset] {
                        let c = variance_certificate(&g, &p, b, u)?;
                        bound.observe(alpha.powf(1.0 - b) - c.value);
                        greedy.observe(c.greedy_bound - c.value);
                        indep.observe(if is_independent_set(&g, &c.greedy_set) { 0.0 } else { 1.0 });
                    }
                }
            }
        }
    }
    Ok(vec![bound.finish(), greedy.finish(), indep.finish(), tight.finish()])
}

/// A random strongly observable graph: random edges and self-loops, then
/// self-loops added wherever a loopless node is not seen by everyone.
pub fn random_strongly_observable_graph(rng: &mut ChaCha8Rng, k: usize) -> FeedbackGraph {
    let density = rng.random::<f64>();
    let loop_prob = rng.random::<f64>();
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random::<f64>() < density {
                edges.push((i, j));
            }
        }
    }
    let mut degree = vec![0usize; k];
    for &(i, j) in &edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    for (i, &d) in degree.iter().enumerate() {
        // A lone loopless node is never observed, so K = 1 always gets a loop.
        if d + 1 < k || k == 1 || rng.random::<f64>() < loop_prob {
            edges.push((i, i));
        }
    }
    FeedbackGraph::from_edges(k, edges)
}

fn verify_estimators(budget: &VerifyBudget) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(1));
    let suite = Suite::Estimators;
    let mut unbiased = Tracker::max_error(suite, "|E[estimate] - loss|", 1e-10);
    let mut second = Tracker::min_slack(suite, "1/P(i) - E[estimate(i)^2] outside J", -1e-10);
    let mut shifted_count = Tracker::max_error(suite, "|J| <= 1", 1.0);
    let mut sign = Tracker::min_slack(suite, "estimates nonnegative outside J", 0.0);
    for _ in 0..budget.estimator_instances {
        let k = rng.random_range(1..=budget.estimator_max_k);
        let g = random_strongly_observable_graph(&mut rng, k);
        let mut p = random_simplex_point(&mut rng, k, false).into_inner();
        // Push mass onto a loopless node half of the time so the shifted branch is exercised.
        if let Some(&j) = g.loopless_nodes().first() {
            if k > 1 && rng.random_bool(0.5) {
                let target = 0.5 + 0.45 * rng.random::<f64>();
                let rest: f64 = 1.0 - p[j];
                for (i, x) in p.iter_mut().enumerate() {
                    *x = if i == j { target } else { *x * (1.0 - target) / rest };
                }
            }
        }
        let p = ActionDistribution::new(p)?;
        let losses: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let j = shifted_node(&g, &p);
        shifted_count.observe(g.loopless_nodes().iter().filter(|&&i| p.probs()[i] > 0.5).count() as f64);

        let mut estimators: Vec<fn(&RoundObservation<'_>, &ActionDistribution) -> Result<crate::estimators::EstimatedLoss>> =
            vec![estimate_shifted];
        if g.has_all_self_loops() {
            estimators.push(estimate_basic);
        }
        for est in estimators {
            let mut mean = vec![0.0; k];
            let mut sq = vec![0.0; k];
            for chosen in 0..k {
                let w = p.probs()[chosen];
                if w == 0.0 {
                    continue;
                }
                let obs = RoundObservation::reveal(chosen, &g, &losses)?;
                let values = est(&obs, &p)?.values;
                for i in 0..k {
                    mean[i] += w * values[i];
                    sq[i] += w * values[i] * values[i];
                    if Some(i) != j {
                        sign.observe(values[i]);
                    }
                }
            }
            for i in 0..k {
                unbiased.observe((mean[i] - losses[i]).abs());
                if Some(i) != j {
                    second.observe(1.0 / g.neighborhood_prob(p.probs(), i) - sq[i]);
                }
            }
        }
    }
    Ok(vec![unbiased.finish(), second.finish(), shifted_count.finish(), sign.finish()])
}

fn verify_solver(budget: &VerifyBudget) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(2));
    let suite = Suite::Solver;
    let mut kkt = Tracker::max_error(suite, "KKT residual", 1e-8);
    let mut shift = Tracker::max_error(suite, "shift invariance (sup norm)", 1e-8);
    let mut simplex = Tracker::max_error(suite, "|sum p - 1|", 1e-9);
    let mut interior = Tracker::min_slack(suite, "min p > 0", f64::MIN_POSITIVE);
    for n in 0..budget.solver_instances {
        let k = rng.random_range(2..=budget.solver_max_k);
        let q = budget.solver_qs[n % budget.solver_qs.len()];
        let eta = 10f64.powf(rng.random_range(-2.0..0.5));
        let scale = 10f64.powf(rng.random_range(-1.0..2.0));
        let losses: Vec<f64> = (0..k).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let params = TsallisParams::new(q, eta)?;
        let sol = ftrl_update(&losses, &params)?;
        kkt.observe(kkt_residual(&losses, &params, &sol));
        simplex.observe((sol.distribution.probs().iter().sum::<f64>() - 1.0).abs());
        interior.observe(sol.distribution.probs().iter().copied().fold(f64::INFINITY, f64::min));
        let c = rng.random_range(-1e3..1e3);
        let moved: Vec<f64> = losses.iter().map(|l| l + c).collect();
        let other = ftrl_update(&moved, &params)?;
        let diff = sol
            .distribution
            .probs()
            .iter()
            .zip(other.distribution.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        shift.observe(diff);
    }
    Ok(vec![kkt.finish(), shift.finish(), simplex.finish(), interior.finish()])
}

fn verify_doubling(budget: &VerifyBudget) -> Result<Vec<CheckOutcome>> {
    let suite = Suite::Doubling;
    let mut bbar = Tracker::min_slack(suite, "alpha_t^q - Bbar_t(q)", -1e-9);
    let mut restarts = Tracker::min_slack(suite, "ceil(log2 alpha_bar) - restarts", 0.0);
    let mut schedule = Tracker::max_error(suite, "epoch parameters match the doubling tuning", 0.0);
    let k = 8;
    let losses = LossSource::BernoulliGap { base: 0.5, gap: 0.1, best: 5 };
    let envs = vec![
        EnvironmentSpec::TimeVarying {
            k,
            schedule: GraphSchedule::Periodic { graphs: vec![GraphKind::Experts, GraphKind::Bandit] },
            losses: losses.clone(),
        },
        EnvironmentSpec::FixedAdversarial { k, graph: GraphKind::DisjointCliques { sizes: vec![2; 4] }, losses: losses.clone() },
        EnvironmentSpec::FixedAdversarial { k, graph: GraphKind::Experts, losses: losses.clone() },
        EnvironmentSpec::TimeVarying {
            k,
            schedule: GraphSchedule::RandomPool {
                graphs: vec![
                    GraphKind::NoSelfloopStar { hubs: 2, leaf_cliques: None },
                    GraphKind::DisjointCliques { sizes: vec![4, 4] },
                    GraphKind::ErdosRenyi { prob: 0.3, seed: 4 },
                ],
            },
            losses,
        },
    ];
    for environment in envs {
        let config = RunConfig {
            learner: LearnerKind::Doubling,
            environment,
            horizon: budget.doubling_horizon,
            seeds: (0..budget.doubling_seeds as u64).map(|s| budget.seed.wrapping_add(s)).collect(),
            alpha: None,
            tuning: TuningOverrides::default(),
        };
        for &seed in &config.seeds {
            let mut trace = Vec::new();
            let run = run_seed(&config, seed, &mut |r| {
                trace.push((r.bbar, r.epoch));
                Ok(())
            })?;
            for ((b, epoch), &alpha) in trace.iter().zip(&run.alphas) {
                let epoch = epoch.expect("doubling reports its epoch");
                let q = tune_epoch(k, epoch, config.horizon)?.q();
                bbar.observe((alpha as f64).powf(q) - b.expect("doubling reports Bbar"));
            }
            let n = run.summary.alpha_bar.log2().ceil().max(0.0);
            restarts.observe(n - run.epochs.len() as f64 + 1.0);
            for e in &run.epochs {
                let p = tune_epoch(k, e.epoch, config.horizon)?;
                let mismatch = e.q != p.q() || e.eta != p.eta();
                schedule.observe(if mismatch { 1.0 } else { 0.0 });
            }
        }
    }
    Ok(vec![bbar.finish(), restarts.finish(), schedule.finish()])
}
