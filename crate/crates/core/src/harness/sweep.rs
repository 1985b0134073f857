//! Grid sweeps over `(K, alpha, T, learner, seed)` on disjoint-clique graphs.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::run::{run_seed, RunConfig};
use crate::environments::{EnvironmentSpec, LossSource};
use crate::error::{Error, Result};
use crate::graph::GraphKind;
use crate::learners::{LearnerKind, TuningOverrides};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub ks: Vec<usize>,
    pub alphas: Vec<usize>,
    pub horizons: Vec<u64>,
    pub learners: Vec<LearnerKind>,
    pub seeds: Vec<u64>,
    /// Bernoulli mean of every action but the best one.
    #[serde(default = "default_base")]
    pub base: f64,
    /// How much lower the best action's mean is.
    #[serde(default = "default_gap")]
    pub gap: f64,
}

fn default_base() -> f64 {
    0.5
}

fn default_gap() -> f64 {
    0.1
}

/// One row of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    /// Requested independence number.
    pub alpha: usize,
    pub horizon: u64,
    pub learner: LearnerKind,
    pub seed: u64,
    /// Independence number of the generated graph, from the exact solver.
    pub alpha_measured: f64,
    pub q: Option<f64>,
    pub eta: Option<f64>,
    pub regret: f64,
    pub expected_regret: f64,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    pub restarts: Option<usize>,
}

/// Clique sizes splitting `k` nodes into `alpha` parts as evenly as possible,
/// larger parts first.
pub fn clique_sizes(k: usize, alpha: usize) -> Vec<usize> {
    (0..alpha).map(|i| k / alpha + usize::from(i < k % alpha)).collect()
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() || self.alphas.is_empty() || self.horizons.is_empty() || self.learners.is_empty() {
            return Err(Error::Config("sweep grid has an empty axis".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("sweep grid has no seeds".into()));
        }
        for &k in &self.ks {
            for &a in &self.alphas {
                if a == 0 || a > k {
                    return Err(Error::Config(format!("alpha = {a} is not in 1..={k}")));
                }
            }
        }
        if self.horizons.contains(&0) {
            return Err(Error::Config("horizon T must be at least 1".into()));
        }
        Ok(())
    }

    /// Cells in `(K, alpha, T, learner)` lexicographic order.
    pub fn cells(&self) -> Vec<RunConfig> {
        let mut out = Vec::new();
        for &k in &self.ks {
            for &alpha in &self.alphas {
                if alpha > k {
                    continue;
                }
                for &horizon in &self.horizons {
                    for &learner in &self.learners {
                        out.push(RunConfig {
                            learner,
                            environment: EnvironmentSpec::FixedAdversarial {
                                k,
                                graph: GraphKind::DisjointCliques { sizes: clique_sizes(k, alpha) },
                                losses: LossSource::BernoulliGap { base: self.base, gap: self.gap, best: 0 },
                            },
                            horizon,
                            seeds: self.seeds.clone(),
                            alpha: None,
                            tuning: TuningOverrides::default(),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Runs every `(cell, seed)` pair in the rayon pool; rows come back in
/// grid order, seeds innermost.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let cells = grid.cells();
    let jobs: Vec<(usize, u64)> =
        (0..cells.len()).flat_map(|c| grid.seeds.iter().map(move |&s| (c, s))).collect();
    jobs.par_iter()
        .map(|&(c, seed)| {
            let cfg = &cells[c];
            let run = run_seed(cfg, seed, &mut |_| Ok(()))?;
            let s = run.summary;
            let alpha = match &cfg.environment {
                EnvironmentSpec::FixedAdversarial { graph: GraphKind::DisjointCliques { sizes }, .. } => sizes.len(),
                _ => unreachable!("sweep cells use clique graphs"),
            };
            Ok(SweepRow {
                k: s.k,
                alpha,
                horizon: s.horizon,
                learner: s.learner,
                seed,
                alpha_measured: s.alpha_bar,
                q: s.q,
                eta: s.eta,
                regret: s.regret,
                expected_regret: s.expected_regret,
                bound: s.bound,
                ratio: s.ratio,
                restarts: s.restarts,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{tune, TuningInputs, TuningVariant};

    fn grid() -> SweepGrid {
        SweepGrid {
            ks: vec![16],
            alphas: vec![1, 2, 4, 8, 16],
            horizons: vec![200],
            learners: vec![LearnerKind::QftrlThm1],
            seeds: vec![0, 1],
            base: 0.5,
            gap: 0.1,
        }
    }

    #[test]
    fn sizes_are_balanced() {
        assert_eq!(clique_sizes(16, 5), vec![4, 3, 3, 3, 3]);
        assert_eq!(clique_sizes(8, 8), vec![1; 8]);
        assert_eq!(clique_sizes(7, 1), vec![7]);
    }

    #[test]
    fn measured_alpha_and_q_match_the_cell() {
        let rows = sweep(&grid()).unwrap();
        assert_eq!(rows.len(), 10);
        for r in &rows {
            assert_eq!(r.alpha_measured, r.alpha as f64);
            let p = tune(&TuningInputs {
                num_actions: 16,
                alpha_guess: r.alpha as f64,
                horizon: 200,
                variant: TuningVariant::SelfLoops,
            })
            .unwrap();
            assert_eq!(r.q, Some(p.q()));
        }
        assert_eq!(rows.last().unwrap().q, Some(0.5));
    }

    #[test]
    fn rows_are_deterministic_and_ordered() {
        let a = sweep(&grid()).unwrap();
        let b = sweep(&grid()).unwrap();
        assert_eq!(a, b);
        assert_eq!((a[0].alpha, a[0].seed), (1, 0));
        assert_eq!((a[1].alpha, a[1].seed), (1, 1));
        let mut buf = Vec::new();
        write_sweep_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,alpha,horizon,learner,seed,alpha_measured,q,eta,"));
        assert_eq!(text.lines().count(), 11);
    }

    #[test]
    fn empty_axis_is_a_config_error() {
        let mut g = grid();
        g.seeds.clear();
        assert!(matches!(sweep(&g), Err(Error::Config(_))));
        let mut g = grid();
        g.alphas = vec![17];
        assert!(matches!(sweep(&g), Err(Error::Config(_))));
    }
}
