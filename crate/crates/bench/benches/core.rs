use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fgraph_core::environments::{EnvironmentSpec, LossSource};
use fgraph_core::graph::{generate_graph, independence_number, GraphKind, IndependenceMode};
use fgraph_core::harness::{run_seed, RunConfig};
use fgraph_core::learners::{LearnerKind, TuningOverrides};
use fgraph_core::tsallis::{ftrl_update, TsallisParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ftrl(c: &mut Criterion) {
    let mut group = c.benchmark_group("ftrl_update");
    let params = TsallisParams::new(0.66, 0.05).unwrap();
    for k in [4usize, 16, 64, 256] {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let loss: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..200.0)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(k), &loss, |b, loss| {
            b.iter(|| ftrl_update(black_box(loss), &params).unwrap())
        });
    }
    group.finish();
}

fn independence(c: &mut Criterion) {
    let mut group = c.benchmark_group("independence_number");
    for k in [16usize, 32, 40] {
        let g = generate_graph(&GraphKind::ErdosRenyi { prob: 0.3, seed: 11 }, k).unwrap();
        group.bench_with_input(BenchmarkId::new("exact", k), &g, |b, g| {
            b.iter(|| independence_number(black_box(g), IndependenceMode::Exact).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("greedy", k), &g, |b, g| {
            b.iter(|| independence_number(black_box(g), IndependenceMode::Greedy).unwrap())
        });
    }
    group.finish();
}

fn protocol(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_1000_rounds");
    group.sample_size(20);
    for learner in [LearnerKind::QftrlThm1, LearnerKind::Doubling] {
        let config = RunConfig {
            learner,
            environment: EnvironmentSpec::FixedAdversarial {
                k: 16,
                graph: GraphKind::DisjointCliques { sizes: vec![4; 4] },
                losses: LossSource::BernoulliGap { base: 0.5, gap: 0.1, best: 0 },
            },
            horizon: 1000,
            seeds: vec![0],
            alpha: None,
            tuning: TuningOverrides::default(),
        };
        group.bench_function(learner.as_str(), |b| b.iter(|| run_seed(&config, 0, &mut |_| Ok(())).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, ftrl, independence, protocol);
criterion_main!(benches);
