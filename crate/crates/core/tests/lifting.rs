use std::collections::BTreeMap;

use rcc::complex::{complex_from_json, complex_to_json, summarize};
use rcc::graph::{load_edge_list, save_edge_list, Graph, GraphModel};
use rcc::lifting::{sample_lifting, SamplingConfig, SamplingMode};
use rcc::occurrence::Approximation;

fn mode(pairs: &[(usize, f64)]) -> SamplingMode {
    SamplingMode::UniformProbability(pairs.iter().copied().collect::<BTreeMap<_, _>>())
}

#[test]
fn expected_cell_count_small() {
    let mut total = 0usize;
    let seeds = 20;
    for seed in 0..seeds {
        let g = GraphModel::ErdosRenyi { n: 20, p: 0.4 }.sample(100 + seed).unwrap();
        assert!(g.is_connected());
        let m = SamplingMode::ExpectedCells { nu: 60.0, threshold: 4 };
        let mut cfg = SamplingConfig::new(300, m, Approximation::Fast, seed);
        cfg.edge_probability = Some(0.4);
        total += sample_lifting(&g, &cfg).unwrap().0.cell_count();
    }
    let mean = total as f64 / seeds as f64;
    assert!((mean / 60.0 - 1.0).abs() < 0.15, "{mean}");
}

#[test]
fn complete_graph_uniform_triangles() {
    // K_6 has 20 triangles; with P_3 = 0.5 about 10 are kept
    let g = Graph::complete(6);
    let runs = 200;
    let mut total = 0;
    for seed in 0..runs {
        let cfg = SamplingConfig::new(50, mode(&[(3, 0.5)]), Approximation::Fast, seed);
        let (cc, report) = sample_lifting(&g, &cfg).unwrap();
        assert!(report.undersampled_lengths.is_empty());
        assert!(cc.cells().iter().all(|c| c.len() == 3));
        total += cc.cell_count();
    }
    let mean = total as f64 / runs as f64;
    // sd of one run is sqrt(20 * 0.25)
    assert!((mean - 10.0).abs() < 3.0 * (5.0f64 / runs as f64).sqrt(), "{mean}");
}

#[test]
fn complex_survives_json_and_edge_list_round_trips() {
    let g = GraphModel::ErdosRenyi { n: 25, p: 0.3 }.sample(3).unwrap();
    let g = load_edge_list(&save_edge_list(&g)).unwrap();
    let cfg = SamplingConfig::new(100, mode(&[(3, 0.6), (4, 0.2), (5, 0.05)]), Approximation::Estimated, 8);
    let (cc, _) = sample_lifting(&g, &cfg).unwrap();
    assert!(cc.cell_count() > 0);
    let text = complex_to_json(&cc, None);
    let (back, meta) = complex_from_json(&text).unwrap();
    assert!(meta.is_none());
    assert_eq!(back, cc);
    assert_eq!(complex_to_json(&back, None), text);
    let s = summarize(&back).unwrap();
    assert_eq!(s.n as i64 - s.m as i64 + s.k as i64, s.b0 as i64 - s.b1 as i64 + s.b2 as i64);
}

#[test]
fn skeleton_edges_follow_the_first_stage_probability() {
    let (n, p) = (60, 0.15);
    let pairs = (n * (n - 1) / 2) as f64;
    let counts: Vec<f64> = (0..40)
        .map(|s| GraphModel::ErdosRenyi { n, p }.sample(s).unwrap().edge_count() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let se = (pairs * p * (1.0 - p) / counts.len() as f64).sqrt();
    assert!((mean - pairs * p).abs() < 3.0 * se, "{mean}");
}
