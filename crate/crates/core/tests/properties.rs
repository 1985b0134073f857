use fgraph_core::environments::{
    collect_rounds, write_replay, Environment, EnvironmentSpec, GraphSchedule, LossSource, MtbEnvironment, MtbParams,
    ReplayEnvironment,
};
use fgraph_core::estimators::{estimate_basic, estimate_shifted, shifted_node, RoundObservation};
use fgraph_core::graph::{
    generate_graph, independence_number, is_independent_set, variance_certificate, FeedbackGraph, GraphKind,
    IndependenceMode,
};
use fgraph_core::harness::{regret_from_records, run_seed, RunConfig};
use fgraph_core::learners::{Learner, LearnerKind, QFtrlLearner, TuningOverrides};
use fgraph_core::tsallis::{ftrl_update, kkt_residual, TsallisParams};
use fgraph_core::{ActionDistribution, EstimatorKind};
use proptest::prelude::*;

fn loss_vec(max_k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 2..=max_k)
}

fn q_eta() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..0.999, 0.001f64..5.0)
}

/// Graph with every self-loop and a random edge set.
fn looped_graph(max_k: usize) -> impl Strategy<Value = FeedbackGraph> {
    (1..=max_k).prop_flat_map(|k| {
        prop::collection::vec(any::<bool>(), k * (k - 1) / 2).prop_map(move |bits| {
            let pairs = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
            let edges = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e);
            FeedbackGraph::from_edges(k, (0..k).map(|i| (i, i)).chain(edges))
        })
    })
}

/// Strongly observable graph: loopless nodes are joined to everything.
fn observable_graph(max_k: usize) -> impl Strategy<Value = FeedbackGraph> {
    (2..=max_k).prop_flat_map(|k| {
        (prop::collection::vec(any::<bool>(), k * (k - 1) / 2), prop::collection::vec(any::<bool>(), k)).prop_map(
            move |(bits, loopless)| {
                let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
                let mut edges: Vec<(usize, usize)> =
                    pairs.iter().zip(&bits).filter(|(_, b)| **b).map(|(e, _)| *e).collect();
                for i in 0..k {
                    if loopless[i] {
                        edges.extend((0..k).filter(|&j| j != i).map(|j| (i.min(j), i.max(j))));
                    } else {
                        edges.push((i, i));
                    }
                }
                FeedbackGraph::from_edges(k, edges)
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ftrl_kkt_interior_and_simplex(loss in loss_vec(16), (q, eta) in q_eta()) {
        let params = TsallisParams::new(q, eta).unwrap();
        let sol = ftrl_update(&loss, &params).unwrap();
        let p = sol.distribution.probs();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(p.iter().all(|&x| x > 0.0));
        prop_assert!(kkt_residual(&loss, &params, &sol) <= 1e-8);
    }

    #[test]
    fn ftrl_shift_invariance(loss in loss_vec(16), (q, eta) in q_eta(), c in -1e4f64..1e4) {
        let params = TsallisParams::new(q, eta).unwrap();
        let a = ftrl_update(&loss, &params).unwrap();
        let moved: Vec<f64> = loss.iter().map(|l| l + c).collect();
        let b = ftrl_update(&moved, &params).unwrap();
        for (x, y) in a.distribution.probs().iter().zip(b.distribution.probs()) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn ftrl_monotone_in_own_loss(loss in loss_vec(16), (q, eta) in q_eta(), idx in any::<prop::sample::Index>(), bump in 0.0f64..20.0) {
        let params = TsallisParams::new(q, eta).unwrap();
        let i = idx.index(loss.len());
        let before = ftrl_update(&loss, &params).unwrap().distribution.probs()[i];
        let mut raised = loss.clone();
        raised[i] += bump;
        let after = ftrl_update(&raised, &params).unwrap().distribution.probs()[i];
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn certificate_bound_and_greedy(g in looped_graph(8), seed in any::<u64>(), b in 0.0f64..=1.0) {
        use rand::{Rng, SeedableRng};
        let k = g.num_nodes();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        let p = ActionDistribution::new(w.iter().map(|x| x / s).collect()).unwrap();
        let mask = rng.random_range(1u32..1 << k);
        let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let alpha = independence_number(&g, IndependenceMode::Exact).unwrap().alpha as f64;
        let c = variance_certificate(&g, &p, b, &subset).unwrap();
        prop_assert!(c.value <= alpha.powf(1.0 - b) + 1e-9);
        prop_assert!(is_independent_set(&g, &c.greedy_set));
        prop_assert!(c.value <= c.greedy_bound + 1e-12);
    }

    #[test]
    fn estimator_support(g in observable_graph(10), seed in any::<u64>(), chosen in any::<prop::sample::Index>()) {
        use rand::{Rng, SeedableRng};
        let k = g.num_nodes();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>().powi(4) + 1e-3).collect();
        let s: f64 = w.iter().sum();
        let p = ActionDistribution::new(w.iter().map(|x| x / s).collect()).unwrap();
        let losses: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let chosen = chosen.index(k);
        let obs = RoundObservation::reveal(chosen, &g, &losses).unwrap();
        let j = shifted_node(&g, &p);
        prop_assert!(g.loopless_nodes().iter().filter(|&&i| p.probs()[i] > 0.5).count() <= 1);
        let shifted = estimate_shifted(&obs, &p).unwrap().values;
        for i in 0..k {
            if !g.is_adjacent(chosen, i) && Some(i) != j {
                prop_assert_eq!(shifted[i], 0.0);
            }
            if Some(i) != j {
                prop_assert!(shifted[i] >= 0.0);
            }
        }
        if g.has_all_self_loops() {
            let basic = estimate_basic(&obs, &p).unwrap().values;
            prop_assert_eq!(basic, shifted);
        }
    }

    #[test]
    fn generators_are_strongly_observable(k in 1usize..20, prob in 0.0f64..=1.0, seed in any::<u64>(), hubs in 0usize..4) {
        let mut kinds = vec![GraphKind::Bandit, GraphKind::Experts, GraphKind::ErdosRenyi { prob, seed }];
        if hubs <= k {
            kinds.push(GraphKind::NoSelfloopStar { hubs, leaf_cliques: None });
        }
        for kind in kinds {
            let g = generate_graph(&kind, k).unwrap();
            prop_assert!(g.is_strongly_observable());
        }
    }

    #[test]
    fn mtb_losses_constant_on_cliques(alpha in 2usize..4, extra in 0usize..5, target in 0usize..4, seed in any::<u64>()) {
        let k = alpha * alpha + extra;
        let mut env = MtbEnvironment::build(
            MtbParams { k, alpha, horizon: 200, target, epsilon: None, epsilon_horizon: None, c: None },
            seed,
        ).unwrap();
        let graphs = env.graphs().to_vec();
        for g in &graphs {
            prop_assert!(g.is_strongly_observable());
            prop_assert_eq!(independence_number(g, IndependenceMode::Exact).unwrap().alpha, alpha);
        }
        while let Some(r) = env.next_round() {
            let g = &graphs[r.graph_id];
            for a in 0..k {
                for b in 0..k {
                    if g.is_adjacent(a, b) {
                        prop_assert_eq!(r.losses[a], r.losses[b]);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basic_and_shifted_learners_agree_with_self_loops(g in looped_graph(8), seed in any::<u64>()) {
        let k = g.num_nodes();
        let params = TsallisParams::new(0.7, 0.3).unwrap();
        let mut a = QFtrlLearner::new(k, params, EstimatorKind::Basic, seed);
        let mut b = QFtrlLearner::new(k, params, EstimatorKind::Shifted, seed);
        for t in 0..100usize {
            let losses: Vec<f64> = (0..k).map(|i| ((i * 7 + t * 3) % 11) as f64 / 10.0).collect();
            let ia = a.select_action();
            let ib = b.select_action();
            prop_assert_eq!(ia, ib);
            a.update(&RoundObservation::reveal(ia, &g, &losses).unwrap()).unwrap();
            b.update(&RoundObservation::reveal(ib, &g, &losses).unwrap()).unwrap();
            prop_assert_eq!(a.distribution().probs(), b.distribution().probs());
        }
    }

    #[test]
    fn regret_identity_and_variance_bound(seed in any::<u64>(), learner in prop::sample::select(vec![
        LearnerKind::QftrlThm1, LearnerKind::QftrlThm2, LearnerKind::Doubling, LearnerKind::UniformBaseline,
    ])) {
        let config = RunConfig {
            learner,
            environment: EnvironmentSpec::TimeVarying {
                k: 6,
                schedule: GraphSchedule::RandomPool { graphs: vec![
                    GraphKind::Experts,
                    GraphKind::DisjointCliques { sizes: vec![3, 2, 1] },
                    GraphKind::ErdosRenyi { prob: 0.4, seed: 9 },
                ] },
                losses: LossSource::ShiftingMeans { amplitude: 0.4, period: 50 },
            },
            horizon: 300,
            seeds: vec![seed],
            alpha: None,
            tuning: TuningOverrides::default(),
        };
        let mut records = Vec::new();
        let run = run_seed(&config, seed, &mut |r| { records.push(r.clone()); Ok(()) }).unwrap();
        let (learner_loss, best, regret) = regret_from_records(&records);
        prop_assert_eq!(learner_loss, run.summary.learner_loss);
        prop_assert_eq!(best, run.summary.best_loss);
        prop_assert_eq!(regret, run.summary.regret);
        for (r, &alpha) in records.iter().zip(&run.alphas) {
            if let (Some(b), Some(q)) = (r.bbar, run.summary.q) {
                let q = if learner == LearnerKind::Doubling {
                    fgraph_core::learners::tune_epoch(6, r.epoch.unwrap(), 300).unwrap().q()
                } else { q };
                prop_assert!(b <= (alpha as f64).powf(q) + 1e-9);
            }
        }
        if let Some(n) = run.summary.restarts {
            prop_assert!(n as f64 <= run.summary.alpha_bar.log2().ceil());
        }
    }

    #[test]
    fn replay_round_trip(seed in any::<u64>()) {
        let spec = EnvironmentSpec::TimeVarying {
            k: 5,
            schedule: GraphSchedule::Periodic { graphs: vec![GraphKind::Bandit, GraphKind::NoSelfloopStar { hubs: 1, leaf_cliques: None }] },
            losses: LossSource::Bernoulli { means: vec![0.1, 0.3, 0.5, 0.7, 0.9] },
        };
        let mut env = spec.build(40, seed).unwrap();
        let mut buf = Vec::new();
        write_replay(env.as_mut(), &mut buf).unwrap();
        let mut fresh = spec.build(40, seed).unwrap();
        let original = collect_rounds(fresh.as_mut());
        let mut replay = ReplayEnvironment::from_reader(buf.as_slice()).unwrap();
        prop_assert_eq!(replay.graphs(), fresh.graphs());
        prop_assert_eq!(collect_rounds(&mut replay), original);
    }
}
