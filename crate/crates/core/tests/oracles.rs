use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use rcc::exec::Parallelism;
use rcc::graph::{Graph, GraphModel};
use rcc::occurrence::rho_exact_lrw;
use rcc::oracles::{
    enumerate_spanning_trees, rejection_sample_cells, rho_exact_matrix_tree, rho_monte_carlo,
    simple_cycles, tree_induces,
};
use rcc::seed::rng_from_seed;

fn connected(n: usize, p: f64, seed: u64) -> Graph {
    (seed..).map(|s| GraphModel::ErdosRenyi { n, p }.sample(s).unwrap()).find(Graph::is_connected).unwrap()
}

#[test]
fn matrix_tree_matches_lrw_and_enumeration_on_seven_nodes() {
    for seed in 0..12 {
        let g = connected(7, 0.55, seed * 31);
        let trees = enumerate_spanning_trees(&g, 20_000).unwrap();
        for c in simple_cycles(&g, u64::MAX).unwrap() {
            let exact = rho_exact_matrix_tree(&g, &c).unwrap();
            let hits = trees.iter().filter(|t| tree_induces(t, &c)).count();
            assert_eq!(exact, BigRational::new(hits.into(), trees.len().into()));
            let lrw = rho_exact_lrw(&c, &g).unwrap();
            assert!((lrw - exact.to_f64().unwrap()).abs() < 1e-9, "{:?}", c.nodes());
        }
    }
}

#[test]
fn occurrence_probabilities_sum_to_cycle_rank() {
    // every tree induces exactly m - n + 1 cycles
    for seed in 0..8 {
        let g = connected(7, 0.5, 1000 + seed);
        let total = simple_cycles(&g, u64::MAX)
            .unwrap()
            .iter()
            .map(|c| rho_exact_matrix_tree(&g, c).unwrap())
            .fold(BigRational::zero(), |a, b| a + b);
        let rank = (g.edge_count() - g.node_count() + 1) as i64;
        assert_eq!(total, BigRational::from_integer(rank.into()));
    }
}

#[test]
fn monte_carlo_agrees_with_matrix_tree() {
    let mut rng = rng_from_seed(4);
    for seed in 0..10 {
        let g = connected(6 + seed as usize % 2, 0.6, 77 + seed * 13);
        let cycles = simple_cycles(&g, u64::MAX).unwrap();
        let c = &cycles[rng.gen_range(0..cycles.len())];
        let exact = rho_exact_matrix_tree(&g, c).unwrap().to_f64().unwrap();
        let est = rho_monte_carlo(&g, c, 20_000, seed, Parallelism::Parallel).unwrap();
        let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt();
        assert!((est.rho - exact).abs() <= 3.0 * sigma, "{est:?} vs {exact}");
    }
}

#[test]
fn rejection_sampling_is_uniform_over_cycles() {
    let g = connected(8, 0.45, 5);
    let squares = simple_cycles(&g, u64::MAX).unwrap().into_iter().filter(|c| c.len() == 4).collect::<Vec<_>>();
    assert!(squares.len() >= 3 && squares.len() <= 20, "{}", squares.len());
    let draws = 20_000;
    let sample = rejection_sample_cells(&g, 4, draws, 8, u64::MAX).unwrap();
    assert!(!sample.shortfall);
    let mut freq: BTreeMap<_, u64> = BTreeMap::new();
    for c in &sample.cells {
        *freq.entry(c.clone()).or_insert(0) += 1;
    }
    assert_eq!(freq.len(), squares.len());
    let expected = draws as f64 / squares.len() as f64;
    let chi2: f64 = freq.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    // 99.9% quantile of chi-square with up to 19 degrees of freedom
    assert!(chi2 < 43.82, "chi2 = {chi2}");
}

#[test]
fn rejection_acceptance_rate_tracks_density() {
    let (n, l, trials) = (12, 4, 200_000u64);
    let mut rates = Vec::new();
    let mut expected = Vec::new();
    for seed in 0..10 {
        let g = GraphModel::ErdosRenyi { n, p: 0.5 }.sample(seed).unwrap();
        let sample = rejection_sample_cells(&g, l, usize::MAX, seed, trials).unwrap();
        rates.push(sample.cells.len() as f64 / trials as f64);
        let squares = simple_cycles(&g, u64::MAX).unwrap().iter().filter(|c| c.len() == l).count();
        // 2l ordered tuples per cycle out of n (n-1) ... (n-l+1)
        let tuples: f64 = (0..l).map(|i| (n - i) as f64).product();
        expected.push(2.0 * l as f64 * squares as f64 / tuples);
    }
    for (r, e) in rates.iter().zip(&expected) {
        let sigma = (e * (1.0 - e) / trials as f64).sqrt();
        assert!((r - e).abs() <= 3.0 * sigma, "{r} vs {e}");
    }
    // averaged over graphs the rate is near p^l
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    assert!((mean - 0.5f64.powi(4)).abs() < 0.02, "{mean}");
}
