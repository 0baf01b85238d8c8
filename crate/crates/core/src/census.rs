//! Simple-cycle counts per length.
//!
//! The sampled estimate adds the counting coefficient `1 / (rho_c * s)` for
//! every cycle induced by each of `s` uniform spanning trees. A cycle seen
//! in several trees is counted every time; the coefficient already divides
//! by the chance of seeing it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Parallelism};
use crate::graph::Graph;
use crate::occurrence::{Approximation, OccurrenceParams};
use crate::scan::occurrence;
use crate::seed::{derive_seed, stream};
use crate::tree::{non_tree_edges, wilson_ust};
use crate::wide::{WideFloat, WideSum};

/// Default cap on DFS node visits for [`exact_counts`].
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub node_count: usize,
    /// Estimated number of cycles per length, only lengths with occurrences.
    /// Values beyond the `f64` range serialize as `"<mantissa>p<exponent>"`.
    pub estimates: BTreeMap<usize, WideFloat>,
    /// Number of induced cycles per length summed over all trees.
    pub occurrences: BTreeMap<usize, u64>,
    pub trees_used: usize,
    pub seed: u64,
    /// Occurrence estimates above 1 that were clamped.
    pub clamp_count: u64,
}

impl CycleCensus {
    /// Saturates to infinity for counts beyond the `f64` range.
    pub fn estimate(&self, l: usize) -> f64 {
        self.estimate_wide(l).to_f64()
    }

    pub fn estimate_wide(&self, l: usize) -> WideFloat {
        self.estimates.get(&l).copied().unwrap_or(WideFloat::ZERO)
    }

    pub fn occurrences(&self, l: usize) -> u64 {
        self.occurrences.get(&l).copied().unwrap_or(0)
    }

    /// Lengths occurring strictly more than `threshold` times.
    pub fn eligible_lengths(&self, threshold: u64) -> Vec<usize> {
        self.occurrences.iter().filter(|&(_, &o)| o > threshold).map(|(&l, _)| l).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusConfig {
    pub trees: usize,
    pub approximation: Approximation,
    pub seed: u64,
    /// Known generating edge probability; the MLE density is used otherwise.
    pub edge_probability: Option<f64>,
    pub parallelism: Parallelism,
}

impl CensusConfig {
    pub fn new(trees: usize, approximation: Approximation, seed: u64) -> Self {
        CensusConfig {
            trees,
            approximation,
            seed,
            edge_probability: None,
            parallelism: Parallelism::default(),
        }
    }
}

struct TreeTally {
    weights: Vec<WideSum>,
    counts: Vec<u64>,
    clamped: u64,
}

pub fn estimate_counts(g: &Graph, cfg: &CensusConfig) -> Result<CycleCensus> {
    if cfg.trees == 0 {
        return Err(Error::InvalidInput("at least one tree is required".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.node_count();
    let params = OccurrenceParams::for_graph(g, cfg.edge_probability)?;
    let inv_s = WideFloat::new(1.0 / cfg.trees as f64);
    let tallies = map_indexed(cfg.parallelism, cfg.trees, |i| -> Result<TreeTally> {
        let tree = wilson_ust(g, 0, derive_seed(cfg.seed, stream::TREE, i as u64))?;
        let mut tally = TreeTally {
            weights: vec![WideSum::default(); n + 1],
            counts: vec![0; n + 1],
            clamped: 0,
        };
        for edge in non_tree_edges(g, &tree) {
            let occ = occurrence(g, &tree, &edge, params, cfg.approximation)?;
            tally.weights[occ.length].add(inv_s / occ.rho);
            tally.counts[occ.length] += 1;
            tally.clamped += occ.clamped as u64;
        }
        Ok(tally)
    });

    let mut totals = vec![WideSum::default(); n + 1];
    let mut counts = vec![0u64; n + 1];
    let mut clamp_count = 0;
    for tally in tallies {
        let tally = tally?;
        for l in 0..=n {
            if tally.counts[l] > 0 {
                totals[l].add(tally.weights[l].value());
                counts[l] += tally.counts[l];
            }
        }
        clamp_count += tally.clamped;
    }
    let mut estimates = BTreeMap::new();
    let mut occurrences = BTreeMap::new();
    for l in 3..=n {
        if counts[l] > 0 {
            estimates.insert(l, totals[l].value());
            occurrences.insert(l, counts[l]);
        }
    }
    Ok(CycleCensus {
        node_count: n,
        estimates,
        occurrences,
        trees_used: cfg.trees,
        seed: cfg.seed,
        clamp_count,
    })
}

fn check_range(n: usize, l: usize) -> Result<()> {
    if l < 3 || l > n {
        return Err(Error::InvalidInput(format!("cycle length {l} outside [3, {n}]")));
    }
    Ok(())
}

/// Number of `l`-cycles in the complete graph, `C(n, l) (l - 1)! / 2`.
pub fn count_complete(n: usize, l: usize) -> Result<BigUint> {
    check_range(n, l)?;
    let falling: BigUint = (n - l + 1..=n).map(BigUint::from).product();
    Ok(falling / BigUint::from(2 * l))
}

/// Expected number of `l`-cycles in `G(n, p)`, `C(n, l) (l - 1)! / 2 * p^l`,
/// evaluated in log space.
pub fn apriori_count_er(n: usize, p: f64, l: usize) -> Result<f64> {
    apriori_count_er_wide(n, p, l).map(WideFloat::to_f64)
}

pub fn apriori_count_er_wide(n: usize, p: f64, l: usize) -> Result<WideFloat> {
    check_range(n, l)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(WideFloat::ZERO);
    }
    let log_count: f64 =
        (0..l).map(|i| ((n - i) as f64).ln()).sum::<f64>() - ((2 * l) as f64).ln();
    Ok(WideFloat::from_ln(log_count + l as f64 * p.ln()))
}

/// Exact cycle counts per length by backtracking.
///
/// Every simple path starting at its minimum node is extended over larger
/// nodes only; a cycle is counted when the path returns to its start and the
/// second node is smaller than the last, so each cycle is counted once.
/// `budget` caps the number of path extensions; exceeding it is an error.
pub fn exact_counts(g: &Graph, budget: u64) -> Result<BTreeMap<usize, u64>> {
    exact_counts_up_to(g, g.node_count(), budget)
}

/// [`exact_counts`] restricted to cycles of length at most `max_length`.
pub fn exact_counts_up_to(g: &Graph, max_length: usize, budget: u64) -> Result<BTreeMap<usize, u64>> {
    let n = g.node_count();
    let mut counts = vec![0u64; n + 1];
    visit_simple_cycles(g, max_length, budget, |path| counts[path.len()] += 1)?;
    Ok((3..=n).filter(|&l| counts[l] > 0).map(|l| (l, counts[l])).collect())
}

/// Calls `visit` once per simple cycle of length at most `max_length`, with
/// the nodes in canonical order.
pub(crate) fn visit_simple_cycles<F>(g: &Graph, max_length: usize, budget: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]),
{
    let n = g.node_count();
    let mut on_path = vec![false; n];
    let mut visits = 0u64;
    let mut path = Vec::with_capacity(n);
    // (node, next neighbor offset)
    let mut stack: Vec<(usize, usize)> = Vec::with_capacity(n);
    for start in 0..n {
        path.push(start);
        on_path[start] = true;
        stack.push((start, 0));
        while let Some(top) = stack.last_mut() {
            let (u, offset) = *top;
            let nbrs = g.neighbors(u);
            if offset == nbrs.len() {
                stack.pop();
                path.pop();
                on_path[u] = false;
                continue;
            }
            top.1 += 1;
            let w = nbrs[offset];
            if w == start {
                if path.len() >= 3 && path[1] < path[path.len() - 1] {
                    visit(&path);
                }
            } else if w > start && !on_path[w] && path.len() < max_length {
                visits += 1;
                if visits > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                on_path[w] = true;
                path.push(w);
                stack.push((w, 0));
            }
        }
    }
    Ok(())
}

pub(crate) fn format_float(x: WideFloat) -> String {
    if !x.fits_f64() {
        return x.to_string();
    }
    let x = x.to_f64();
    if x == 0.0 {
        "0".into()
    } else if x.abs() >= 1e16 || x.abs() < 1e-6 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// CSV with header `length,estimate,occurrences,apriori` (plus `exact` when
/// given), one row per length in `3..=n` with a nonzero column.
pub fn census_csv(
    census: &CycleCensus,
    apriori_p: f64,
    exact: Option<&BTreeMap<usize, u64>>,
) -> Result<String> {
    let mut out = String::from("length,estimate,occurrences,apriori");
    if exact.is_some() {
        out.push_str(",exact");
    }
    out.push('\n');
    for l in 3..=census.node_count {
        let estimate = census.estimate_wide(l);
        let occ = census.occurrences(l);
        let apriori = apriori_count_er_wide(census.node_count, apriori_p, l)?;
        let exact_l = exact.map(|e| e.get(&l).copied().unwrap_or(0));
        if estimate.is_zero() && occ == 0 && apriori.is_zero() && exact_l.unwrap_or(0) == 0 {
            continue;
        }
        let _ = write!(out, "{l},{},{occ},{}", format_float(estimate), format_float(apriori));
        if let Some(e) = exact_l {
            let _ = write!(out, ",{e}");
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphModel;

    #[test]
    fn complete_graph_counts() {
        assert_eq!(count_complete(4, 3).unwrap(), BigUint::from(4u32));
        assert_eq!(count_complete(4, 4).unwrap(), BigUint::from(3u32));
        assert_eq!(count_complete(8, 3).unwrap(), BigUint::from(56u32));
        // (n-1)!/2 at l = n
        assert_eq!(count_complete(7, 7).unwrap(), BigUint::from(360u32));
        assert!(count_complete(4, 5).is_err());
        assert!(count_complete(4, 2).is_err());
    }

    #[test]
    fn exact_counts_small_graphs() {
        assert_eq!(exact_counts(&Graph::complete(3), 1000).unwrap(), BTreeMap::from([(3, 1)]));
        assert_eq!(
            exact_counts(&Graph::complete(5), 10_000).unwrap(),
            BTreeMap::from([(3, 10), (4, 15), (5, 12)])
        );
        let bowtie = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(exact_counts(&bowtie, 1000).unwrap(), BTreeMap::from([(3, 2)]));
        assert!(exact_counts(&Graph::path(6), 100).unwrap().is_empty());
    }

    #[test]
    fn exact_counts_match_complete_formula() {
        for n in 3..9 {
            let counts = exact_counts(&Graph::complete(n), u64::MAX).unwrap();
            for l in 3..=n {
                assert_eq!(BigUint::from(counts[&l]), count_complete(n, l).unwrap());
            }
        }
    }

    #[test]
    fn bounded_counts_agree_below_the_bound() {
        let g = GraphModel::ErdosRenyi { n: 11, p: 0.5 }.sample(8).unwrap();
        let all = exact_counts(&g, u64::MAX).unwrap();
        let short = exact_counts_up_to(&g, 6, u64::MAX).unwrap();
        assert_eq!(short, all.into_iter().filter(|&(l, _)| l <= 6).collect());
    }

    #[test]
    fn exact_counts_refuse_over_budget() {
        assert_eq!(
            exact_counts(&Graph::complete(9), 50),
            Err(Error::BudgetExceeded { budget: 50 })
        );
    }

    #[test]
    fn apriori_values() {
        assert!((apriori_count_er(8, 1.0, 3).unwrap() - 56.0).abs() < 1e-9);
        assert_eq!(apriori_count_er(8, 0.0, 5).unwrap(), 0.0);
        let big = apriori_count_er(100, 1.0, 100).unwrap();
        assert!(big.is_finite() && big > 1e150);
    }

    #[test]
    fn apriori_matches_sampled_mean() {
        // n=20, p=0.3, l=5 over 200 graphs
        let model = GraphModel::ErdosRenyi { n: 20, p: 0.3 };
        let samples: Vec<f64> = (0..200)
            .map(|s| {
                let g = model.sample(s).unwrap();
                let counts = exact_counts_up_to(&g, 5, u64::MAX).unwrap();
                counts.get(&5).copied().unwrap_or(0) as f64
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / 200.0;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 199.0;
        let expected = apriori_count_er(20, 0.3, 5).unwrap();
        assert!((mean - expected).abs() < 3.0 * (var / 200.0).sqrt(), "{mean} vs {expected}");
    }

    #[test]
    fn k3_census_is_exact() {
        for s in [1, 7, 50] {
            let census =
                estimate_counts(&Graph::complete(3), &CensusConfig::new(s, Approximation::Fast, 3))
                    .unwrap();
            assert!((census.estimate(3) - 1.0).abs() < 1e-12);
            assert_eq!(census.occurrences(3), s as u64);
        }
    }

    #[test]
    fn census_invariants() {
        let g = GraphModel::ErdosRenyi { n: 14, p: 0.4 }.sample(2).unwrap();
        assert!(g.is_connected());
        let census = estimate_counts(&g, &CensusConfig::new(50, Approximation::Estimated, 1)).unwrap();
        for (&l, &e) in &census.estimates {
            assert!((3..=14).contains(&l));
            assert!(e > WideFloat::ZERO);
            assert!(census.occurrences(l) >= 1);
        }
        assert_eq!(
            census.estimates.keys().collect::<Vec<_>>(),
            census.occurrences.keys().collect::<Vec<_>>()
        );
        let total: u64 = census.occurrences.values().sum();
        assert_eq!(total, 50 * (g.edge_count() - g.node_count() + 1) as u64);
    }

    #[test]
    fn census_rejects_disconnected_graphs() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let err = estimate_counts(&g, &CensusConfig::new(5, Approximation::Fast, 0));
        assert_eq!(err.unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn csv_layout() {
        let census =
            estimate_counts(&Graph::complete(3), &CensusConfig::new(4, Approximation::Fast, 0)).unwrap();
        let exact = exact_counts(&Graph::complete(3), 100).unwrap();
        let csv = census_csv(&census, 1.0, Some(&exact)).unwrap();
        assert_eq!(csv, "length,estimate,occurrences,apriori,exact\n3,1,4,1,1\n");
    }
}
