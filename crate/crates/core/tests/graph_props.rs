mod common;

use blotto_core::graph::{binomial, Allocation, LayeredGraph, DEFAULT_ENUMERATION_CAP};
use common::{dyadic_costs, exhaustive_min, graph, small_instances};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Count all allocations of `m` troops to `n` fields by recursion.
fn count_allocations(m: usize, n: usize) -> u64 {
    if n == 1 {
        return 1;
    }
    (0..=m).map(|k| count_allocations(m - k, n - 1)).sum()
}

fn allocation_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (1usize..7, 2usize..7).prop_flat_map(|(m, n)| {
        proptest::collection::vec(0..=m, n - 1).prop_map(move |mut cuts| {
            cuts.sort_unstable();
            let mut alloc = Vec::with_capacity(n);
            let mut prev = 0;
            for c in cuts {
                alloc.push(c - prev);
                prev = c;
            }
            alloc.push(m - prev);
            (m, alloc)
        })
    })
}

#[test]
fn counts_match_direct_enumeration() {
    for (m, n) in small_instances(5) {
        let g = graph(m, n);
        let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(paths.len() as u64, count_allocations(m, n), "({m},{n})");
        assert_eq!(g.path_count(), binomial(n + m - 1, n - 1));
        let mut interior = 0;
        let mut edges = 0;
        // count reachable layer nodes and edges by hand
        for layer in 1..n {
            interior += m + 1;
            edges += if layer == 1 { m + 1 } else { (m + 1) * (m + 2) / 2 };
        }
        edges += m + 1;
        assert_eq!(g.num_nodes(), interior + 2);
        assert_eq!(g.num_edges(), edges);
    }
}

#[test]
fn every_allocation_appears_once() {
    let g = graph(3, 4);
    let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
    let mut seen: Vec<Vec<usize>> = paths
        .iter()
        .map(|p| g.path_to_allocation(p).troops().to_vec())
        .collect();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), paths.len());
    assert!(seen.iter().all(|a| a.iter().sum::<usize>() == 3));
}

#[test]
fn min_cost_path_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (m, n) in small_instances(4).into_iter().chain([(3, 6), (5, 5)]) {
        let g = graph(m, n);
        let paths = g.enumerate_paths(DEFAULT_ENUMERATION_CAP).unwrap();
        for _ in 0..30 {
            let costs = dyadic_costs(g.num_edges(), &mut rng);
            let (p, c) = g.min_cost_path(&costs).unwrap();
            assert_eq!(c, exhaustive_min(&paths, &costs));
            assert_eq!(p.dot(&costs), c);
        }
    }
}

proptest! {
    #[test]
    fn allocation_path_round_trip((m, alloc) in allocation_strategy()) {
        let g = LayeredGraph::new(m, alloc.len()).unwrap();
        let a = Allocation::new(alloc.clone());
        let p = g.allocation_to_path(&a).unwrap();
        prop_assert_eq!(p.edges().len(), alloc.len());
        prop_assert_eq!(g.path_to_allocation(&p), a);
        // edge troop labels are the allocation itself
        for (i, &e) in p.edges().iter().enumerate() {
            prop_assert_eq!(g.edge(e).troops, alloc[i]);
            prop_assert_eq!(g.edge(e).battlefield, i);
        }
        let from_bits = g.path_from_incidence(&p.incidence(g.num_edges())).unwrap();
        prop_assert_eq!(from_bits, p);
    }

    #[test]
    fn closed_forms_hold(m in 1usize..30, n in 2usize..30) {
        let g = LayeredGraph::new(m, n).unwrap();
        prop_assert_eq!(g.num_nodes(), LayeredGraph::node_count_formula(m, n));
        prop_assert_eq!(g.num_edges(), LayeredGraph::edge_count_formula(m, n));
        prop_assert_eq!(g.num_nodes(), 2 + (m + 1) * (n - 1));
        prop_assert_eq!(2 * g.num_edges(), (m + 1) * (4 + (n - 2) * (m + 2)));
    }

    #[test]
    fn edges_are_topological(m in 1usize..8, n in 2usize..8) {
        let g = LayeredGraph::new(m, n).unwrap();
        for e in g.edges() {
            prop_assert!(e.from < e.to);
            let (a, b) = (g.nodes()[e.from], g.nodes()[e.to]);
            prop_assert_eq!(b.layer, a.layer + 1);
            prop_assert_eq!(b.troops - a.troops, e.troops);
        }
    }

    #[test]
    fn wrong_total_is_rejected(m in 1usize..6, extra in 1usize..3) {
        let g = LayeredGraph::new(m, 3).unwrap();
        let a = Allocation::new(vec![m, extra, 0]);
        prop_assert!(g.allocation_to_path(&a).is_err());
    }
}
