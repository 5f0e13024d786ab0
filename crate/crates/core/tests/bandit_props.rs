mod common;

use std::sync::Arc;

use blotto_core::bandit::{estimate_loss, BanditConfig, ComBand, EdgeCb, Learner};
use blotto_core::explore::ExplorationSpec;
use blotto_core::graph::{LayeredGraph, Path, DEFAULT_ENUMERATION_CAP};
use blotto_core::linalg::DEFAULT_REL_TOL;
use blotto_core::weight_push::{CooccurrenceMatrix, EdgeWeights};
use blotto_core::Error;
use common::{brute_cooccurrence, dense_pinv_apply, graph, to_dense};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(gamma: f64, eta: f64, exploration: ExplorationSpec) -> BanditConfig {
    BanditConfig {
        gamma,
        eta,
        horizon: 100,
        exploration,
    }
}

fn skewed_weights(g: &LayeredGraph) -> EdgeWeights {
    EdgeWeights::new((0..g.num_edges()).map(|e| 0.5 + ((e * 5) % 7) as f64 / 4.0).collect()).unwrap()
}

/// Stage-`t` edge losses with every path loss in [0, 1].
fn fixed_losses(g: &LayeredGraph, t: usize) -> Vec<f64> {
    (0..g.num_edges())
        .map(|e| ((e * 7 + t * 3) % 11) as f64 / (11.0 * g.n() as f64))
        .collect()
}

fn max_distribution_gap(comband: &ComBand, edgecb: &mut EdgeCb) -> f64 {
    let d = comband.distribution();
    comband
        .paths()
        .iter()
        .zip(&d)
        .map(|(p, q)| (edgecb.probability(p).unwrap() - q).abs())
        .fold(0.0, f64::max)
}

#[test]
fn learners_agree_under_shared_estimates() {
    let g = Arc::new(graph(3, 3));
    for exploration in [ExplorationSpec::Uniform, ExplorationSpec::Factored(skewed_weights(&g))] {
        let c = cfg(0.3, 0.2, exploration);
        let mut comband = ComBand::new(Arc::clone(&g), &c, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut edgecb = EdgeCb::new(Arc::clone(&g), &c, None).unwrap();
        let paths = comband.paths().to_vec();
        for t in 0..50 {
            assert!(max_distribution_gap(&comband, &mut edgecb) < 1e-10, "stage {t}");
            let p = &paths[(5 * t) % paths.len()];
            let loss = p.dot(&fixed_losses(&g, t));
            let est = comband.estimate(p, loss).unwrap();
            // the Cholesky route of the edge learner gives the same estimate
            let est_edge = edgecb.estimate(p, loss).unwrap();
            let scale = est.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (a, b) in est.iter().zip(&est_edge) {
                assert!((a - b).abs() < 1e-8 * scale);
            }
            comband.apply_estimate(&est).unwrap();
            edgecb.apply_estimate(&est).unwrap();
        }
    }
}

#[test]
fn cooccurrence_of_both_learners_matches_brute_force() {
    let g = Arc::new(graph(2, 4));
    let c = cfg(0.4, 0.1, ExplorationSpec::Factored(skewed_weights(&g)));
    let comband = ComBand::new(Arc::clone(&g), &c, DEFAULT_ENUMERATION_CAP).unwrap();
    let mut edgecb = EdgeCb::new(Arc::clone(&g), &c, None).unwrap();
    let oracle = brute_cooccurrence(g.num_edges(), comband.paths(), &comband.distribution());
    let a = comband.cooccurrence();
    let b = edgecb.cooccurrence().unwrap();
    assert!(common::max_abs_diff(&oracle, a.as_mat()) < 1e-12);
    assert!(common::max_abs_diff(&oracle, b.as_mat()) < 1e-12);
}

#[test]
fn pure_exploration_plays_mu() {
    let g = Arc::new(graph(2, 3));
    let w = skewed_weights(&g);
    let c = cfg(1.0, 0.5, ExplorationSpec::Factored(w.clone()));
    let mut comband = ComBand::new(Arc::clone(&g), &c, DEFAULT_ENUMERATION_CAP).unwrap();
    let paths = comband.paths().to_vec();
    let mu = common::brute_path_probabilities(&paths, w.as_slice());
    let est: Vec<f64> = (0..g.num_edges()).map(|e| e as f64 * 0.1).collect();
    comband.apply_estimate(&est).unwrap();
    for (d, m) in comband.distribution().iter().zip(&mu) {
        assert!((d - m).abs() < 1e-14);
    }
}

#[test]
fn first_stage_is_uniform() {
    let g = Arc::new(graph(3, 3));
    for gamma in [0.0, 0.25, 1.0] {
        let c = cfg(gamma, 0.1, ExplorationSpec::Uniform);
        let comband = ComBand::new(Arc::clone(&g), &c, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut edgecb = EdgeCb::new(Arc::clone(&g), &c, None).unwrap();
        for (p, d) in comband.paths().iter().zip(comband.distribution()) {
            assert!((d - 0.1).abs() < 1e-14);
            assert!((edgecb.probability(p).unwrap() - 0.1).abs() < 1e-14);
        }
    }
}

#[test]
fn estimator_is_unbiased_on_every_path() {
    let g = Arc::new(graph(2, 3));
    let c = cfg(0.3, 0.4, ExplorationSpec::Factored(skewed_weights(&g)));
    let mut comband = ComBand::new(Arc::clone(&g), &c, DEFAULT_ENUMERATION_CAP).unwrap();
    // move away from the uniform start
    let nudged: Vec<f64> = (0..g.num_edges()).map(|e| ((e * 3) % 5) as f64 * 0.2).collect();
    comband.apply_estimate(&nudged).unwrap();
    let paths = comband.paths().to_vec();
    let d = comband.distribution();
    let cm = comband.cooccurrence();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let ell: Vec<f64> = (0..g.num_edges()).map(|_| rng.random_range(0.0..1.0 / 3.0)).collect();
        let mut expected = vec![0.0; g.num_edges()];
        for (p, dp) in paths.iter().zip(&d) {
            let est = estimate_loss(&cm, p, p.dot(&ell), DEFAULT_REL_TOL).unwrap();
            for (x, v) in expected.iter_mut().zip(est) {
                *x += dp * v;
            }
        }
        for q in &paths {
            assert!((q.dot(&expected) - q.dot(&ell)).abs() < 1e-9);
        }
    }
}

#[test]
fn pseudo_inverse_matches_jacobi_oracle() {
    let g = graph(3, 3);
    let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
    let uniform = vec![0.1; 10];
    let cm = CooccurrenceMatrix::from_paths(g.num_edges(), &paths, &uniform);
    let dense = to_dense(cm.as_mat());
    // every path, including the all-in allocations
    for p in &paths {
        let got = estimate_loss(&cm, p, 1.0, DEFAULT_REL_TOL).unwrap();
        let want = dense_pinv_apply(&dense, &p.indicator(g.num_edges()), DEFAULT_REL_TOL);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn selection_follows_the_mixture() {
    let g = Arc::new(graph(2, 3));
    let c = cfg(0.35, 0.5, ExplorationSpec::Factored(skewed_weights(&g)));
    let mut edgecb = EdgeCb::new(Arc::clone(&g), &c, None).unwrap();
    let est: Vec<f64> = (0..g.num_edges()).map(|e| ((e * 2) % 5) as f64 * 0.3).collect();
    edgecb.apply_estimate(&est).unwrap();
    let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
    let probs: Vec<f64> = paths.iter().map(|p| edgecb.probability(p).unwrap()).collect();
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draws = 100_000;
    let mut counts = vec![0usize; paths.len()];
    for _ in 0..draws {
        let p = edgecb.select(&mut rng);
        counts[paths.iter().position(|q| *q == p).unwrap()] += 1;
    }
    for (k, p) in counts.iter().zip(&probs) {
        let freq = *k as f64 / draws as f64;
        assert!((freq - p).abs() < 5.0 * (p * (1.0 - p) / draws as f64).sqrt() + 1e-4);
    }
}

#[test]
fn edge_learner_rejects_unfactored_exploration() {
    let g = Arc::new(graph(2, 2));
    let c = cfg(0.5, 0.1, ExplorationSpec::Explicit(vec![1.0 / 3.0; 3]));
    assert!(matches!(EdgeCb::new(g, &c, None), Err(Error::NotFactored)));
}

#[test]
fn observe_without_select_is_an_error() {
    let g = Arc::new(graph(2, 2));
    let c = cfg(0.5, 0.1, ExplorationSpec::Uniform);
    let mut l = EdgeCb::new(Arc::clone(&g), &c, None).unwrap();
    assert!(l.observe(0.5).is_err());
    let mut r = ComBand::new(g, &c, DEFAULT_ENUMERATION_CAP).unwrap();
    assert!(r.observe(0.5).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    r.select(&mut rng);
    assert!(r.observe(f64::NAN).is_err());
}

#[test]
fn long_runs_keep_weights_finite() {
    let g = Arc::new(graph(3, 4));
    let c = cfg(0.05, 0.5, ExplorationSpec::Uniform);
    let mut l = EdgeCb::new(Arc::clone(&g), &c, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let best = g.allocation_to_path(&blotto_core::graph::Allocation::new(vec![3, 0, 0, 0])).unwrap();
    for _ in 0..5_000 {
        let mut fb = |p: &Path| if *p == best { 0.0 } else { 1.0 };
        l.step(&mut fb, &mut rng).unwrap();
    }
    assert!(l.log_weights().iter().all(|v| v.is_finite()));
    assert!(l.probability(&best).unwrap() > 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn distribution_is_a_probability_vector(
        gamma in 0.0f64..=1.0,
        est in proptest::collection::vec(-20.0f64..20.0, 18),
    ) {
        let g = Arc::new(graph(3, 3));
        let c = cfg(gamma, 0.3, ExplorationSpec::Uniform);
        let mut comband = ComBand::new(Arc::clone(&g), &c, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut edgecb = EdgeCb::new(Arc::clone(&g), &c, None).unwrap();
        comband.apply_estimate(&est).unwrap();
        edgecb.apply_estimate(&est).unwrap();
        let d = comband.distribution();
        prop_assert!(d.iter().all(|p| *p >= 0.0));
        prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(max_distribution_gap(&comband, &mut edgecb) < 1e-10);
    }
}
