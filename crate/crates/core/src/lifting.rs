//! Lifting a graph to a 2-dimensional cell complex.
//!
//! Each of `s` uniform spanning trees exposes the cycles it induces. An
//! exposed cycle of length `l` with occurrence probability `rho` is selected
//! with probability `rho' = (1 - (1 - P_l)^(1/s)) / rho`, so that over all
//! trees it is included with probability `P_l`. When `rho' > 1` the target
//! cannot be met with `s` trees; the draw is clamped and the length reported
//! as undersampled.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::census::{estimate_counts, CensusConfig, CycleCensus};
use crate::complex::{sorted_set, CellComplex2};
use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Parallelism};
use crate::graph::Graph;
use crate::occurrence::{clamp_probability_wide, Approximation, OccurrenceParams};
use crate::scan::occurrence;
use crate::seed::{derive_seed, rng_from_seed, stream};
use crate::tree::{induced_cycle_with_lca, non_tree_edges, wilson_ust};
use crate::wide::WideFloat;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Target inclusion probability per length; absent lengths get 0.
    UniformProbability(BTreeMap<usize, f64>),
    /// Spread `nu` expected cells evenly over lengths occurring more than
    /// `threshold` times in a census pass.
    ExpectedCells { nu: f64, threshold: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingConfig {
    pub trees: usize,
    pub mode: SamplingMode,
    pub approximation: Approximation,
    pub seed: u64,
    pub edge_probability: Option<f64>,
    pub parallelism: Parallelism,
}

impl SamplingConfig {
    pub fn new(trees: usize, mode: SamplingMode, approximation: Approximation, seed: u64) -> Self {
        SamplingConfig {
            trees,
            mode,
            approximation,
            seed,
            edge_probability: None,
            parallelism: Parallelism::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trees == 0 {
            return Err(Error::InvalidInput("at least one tree is required".into()));
        }
        match &self.mode {
            SamplingMode::UniformProbability(p) => {
                if let Some((l, v)) = p.iter().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::InvalidInput(format!("P_{l} = {v} outside [0, 1]")));
                }
            }
            SamplingMode::ExpectedCells { nu, .. } => {
                if !(nu.is_finite() && *nu >= 0.0) {
                    return Err(Error::InvalidInput(format!("nu = {nu} must be nonnegative")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftingReport {
    pub cells_sampled: BTreeMap<usize, u64>,
    pub undersampled_lengths: BTreeSet<usize>,
    /// Selections whose `rho'` exceeded 1.
    pub undersampled_selections: u64,
    /// Occurrence estimates above 1 that were clamped.
    pub clamp_count: u64,
    /// Selections of a cycle already selected from an earlier tree.
    pub duplicate_hits: u64,
    /// Planned `P_l`; tiny planned values serialize as `"<mantissa>p<exponent>"`.
    pub target_probabilities: BTreeMap<usize, WideFloat>,
    /// Census pass, in expected-cells mode.
    pub census: Option<CycleCensus>,
}

impl LiftingReport {
    pub fn total_cells(&self) -> u64 {
        self.cells_sampled.values().sum()
    }
}

/// Per-tree selection probability `(1 - (1 - P)^(1/s)) / rho`.
pub fn selection_probability(p: f64, rho: f64, s: usize) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("occurrence probability {rho} must be positive")));
    }
    if !(0.0..=1.0).contains(&p) || s == 0 {
        return Err(Error::Domain(format!("P = {p}, s = {s}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(-f64::exp_m1(f64::ln_1p(-p) / s as f64) / rho)
}

/// [`selection_probability`] for extended-range `P` and `rho`. The result
/// saturates to infinity when `rho` is negligible against `P`.
pub fn selection_probability_wide(p: WideFloat, rho: WideFloat, s: usize) -> Result<f64> {
    if !(rho > WideFloat::ZERO) {
        return Err(Error::Domain(format!("occurrence probability {rho} must be positive")));
    }
    if p < WideFloat::ZERO || p > WideFloat::ONE || s == 0 {
        return Err(Error::Domain(format!("P = {p}, s = {s}")));
    }
    if p.is_zero() {
        return Ok(0.0);
    }
    let per_tree = if p > WideFloat::new(1e-200) {
        WideFloat::new(-f64::exp_m1(f64::ln_1p(-p.to_f64()) / s as f64))
    } else {
        // 1 - (1 - P)^(1/s) = P/s to within a factor 1 + O(P)
        p / WideFloat::new(s as f64)
    };
    Ok((per_tree / rho).to_f64())
}

/// `P_l = min(1, nu / (|L| N_l))` over the eligible lengths `L`.
pub fn plan_expected_cells(
    census: &CycleCensus,
    nu: f64,
    threshold: u64,
) -> Result<BTreeMap<usize, WideFloat>> {
    let lengths = census.eligible_lengths(threshold);
    if lengths.is_empty() {
        return Err(Error::NoEligibleLengths { threshold });
    }
    let target = WideFloat::new(nu / lengths.len() as f64);
    Ok(lengths
        .into_iter()
        .map(|l| {
            let count = census.estimate_wide(l);
            assert!(count > WideFloat::ZERO, "occurring length {l} has no estimate");
            let p = target / count;
            (l, if p > WideFloat::ONE { WideFloat::ONE } else { p })
        })
        .collect())
}

type Targets = BTreeMap<usize, WideFloat>;

struct TreeSelection {
    cells: Vec<Cycle>,
    undersampled: Vec<usize>,
    undersampled_selections: u64,
    clamped: u64,
}

fn resolve_targets(g: &Graph, cfg: &SamplingConfig) -> Result<(Targets, Option<CycleCensus>)> {
    match &cfg.mode {
        SamplingMode::UniformProbability(p) => {
            Ok((p.iter().map(|(&l, &v)| (l, WideFloat::new(v))).collect(), None))
        }
        SamplingMode::ExpectedCells { nu, threshold } => {
            let census_cfg = CensusConfig {
                trees: cfg.trees,
                approximation: cfg.approximation,
                seed: derive_seed(cfg.seed, stream::CENSUS, 0),
                edge_probability: cfg.edge_probability,
                parallelism: cfg.parallelism,
            };
            let census = estimate_counts(g, &census_cfg)?;
            let plan = plan_expected_cells(&census, *nu, *threshold)?;
            Ok((plan, Some(census)))
        }
    }
}

/// Samples a cell complex with the configured closed-form occurrence
/// probabilities.
pub fn sample_lifting(g: &Graph, cfg: &SamplingConfig) -> Result<(CellComplex2, LiftingReport)> {
    cfg.validate()?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let params = OccurrenceParams::for_graph(g, cfg.edge_probability)?;
    let (targets, census) = resolve_targets(g, cfg)?;
    let approximation = cfg.approximation;
    run_sampling(g, cfg, targets, census, |tree, edge| {
        let occ = occurrence(g, tree, edge, params, approximation)?;
        Ok((occ.length, occ.rho, occ.clamped, occ.cycle))
    })
}

/// Like [`sample_lifting`] with occurrence probabilities from `rho` instead
/// of the closed forms. Every induced cycle is materialized.
pub fn sample_lifting_with<F>(g: &Graph, cfg: &SamplingConfig, rho: F) -> Result<(CellComplex2, LiftingReport)>
where
    F: Fn(&Cycle) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let (targets, census) = resolve_targets(g, cfg)?;
    run_sampling(g, cfg, targets, census, |tree, edge| {
        let c = induced_cycle_with_lca(tree, edge.u, edge.v, edge.lca)?;
        let (r, clamped) = clamp_probability_wide(WideFloat::new(rho(&c)?));
        Ok((c.len(), r, clamped, Some(c)))
    })
}

type Exposure = (usize, WideFloat, bool, Option<Cycle>);

fn run_sampling<F>(
    g: &Graph,
    cfg: &SamplingConfig,
    targets: Targets,
    census: Option<CycleCensus>,
    expose: F,
) -> Result<(CellComplex2, LiftingReport)>
where
    F: Fn(&crate::tree::RootedSpanningTree, &crate::tree::NonTreeEdge) -> Result<Exposure> + Sync,
{
    let s = cfg.trees;
    let master = derive_seed(cfg.seed, stream::SAMPLE, 0);
    let target_of = |l: usize| targets.get(&l).copied().unwrap_or(WideFloat::ZERO);

    let selections = map_indexed(cfg.parallelism, s, |i| -> Result<TreeSelection> {
        let tree = wilson_ust(g, 0, derive_seed(master, stream::TREE, i as u64))?;
        let mut rng = rng_from_seed(derive_seed(master, stream::SELECT, i as u64));
        let mut out = TreeSelection {
            cells: Vec::new(),
            undersampled: Vec::new(),
            undersampled_selections: 0,
            clamped: 0,
        };
        for edge in non_tree_edges(g, &tree) {
            let (length, rho, clamped, cycle) = expose(&tree, &edge)?;
            out.clamped += clamped as u64;
            let p = target_of(length);
            let selection = selection_probability_wide(p, rho, s)?;
            if selection <= 0.0 {
                continue;
            }
            if selection > 1.0 {
                out.undersampled.push(length);
                out.undersampled_selections += 1;
            }
            if rng.gen_bool(selection.min(1.0)) {
                let c = match cycle {
                    Some(c) => c,
                    None => induced_cycle_with_lca(&tree, edge.u, edge.v, edge.lca)?,
                };
                out.cells.push(c);
            }
        }
        Ok(out)
    });

    let mut cells = BTreeSet::new();
    let mut report = LiftingReport {
        cells_sampled: BTreeMap::new(),
        undersampled_lengths: BTreeSet::new(),
        undersampled_selections: 0,
        clamp_count: 0,
        duplicate_hits: 0,
        target_probabilities: targets.clone(),
        census,
    };
    for sel in selections {
        let sel = sel?;
        report.undersampled_lengths.extend(sel.undersampled);
        report.undersampled_selections += sel.undersampled_selections;
        report.clamp_count += sel.clamped;
        for c in sel.cells {
            if !cells.insert(c) {
                report.duplicate_hits += 1;
            }
        }
    }
    for c in &cells {
        *report.cells_sampled.entry(c.len()).or_insert(0) += 1;
    }
    let complex = CellComplex2::new(g.clone(), sorted_set(cells))?;
    Ok((complex, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::CycleCensus;
    use crate::seed::rng_from_seed;

    fn census_with(estimates: &[(usize, f64, u64)]) -> CycleCensus {
        CycleCensus {
            node_count: 10,
            estimates: estimates.iter().map(|&(l, e, _)| (l, WideFloat::new(e))).collect(),
            occurrences: estimates.iter().map(|&(l, _, o)| (l, o)).collect(),
            trees_used: 1,
            seed: 0,
            clamp_count: 0,
        }
    }

    #[test]
    fn selection_probability_cases() {
        assert_eq!(selection_probability(0.0, 0.3, 5).unwrap(), 0.0);
        assert!((selection_probability(0.4, 0.5, 1).unwrap() - 0.8).abs() < 1e-15);
        let v = selection_probability(0.5, 0.1, 10).unwrap();
        assert!((v - 0.669_670_084_631_924_7).abs() < 1e-9, "{v}");
        assert!(selection_probability(0.5, 0.0, 10).is_err());
        assert!(selection_probability(0.5, -1.0, 10).is_err());
        assert_eq!(selection_probability(1.0, 0.5, 3).unwrap(), 2.0);
    }

    #[test]
    fn selection_beyond_f64_range() {
        let w = WideFloat::new;
        let tiny = w(1e-200) * w(1e-200);
        // P and rho both far below the smallest f64
        let v = selection_probability_wide(tiny * w(0.5), tiny, 10).unwrap();
        assert!((v - 0.05).abs() < 1e-15, "{v}");
        assert_eq!(selection_probability_wide(w(0.5), tiny, 10).unwrap(), f64::INFINITY);
        let a = selection_probability_wide(w(0.5), w(0.1), 10).unwrap();
        assert_eq!(a, selection_probability(0.5, 0.1, 10).unwrap());
        assert!(selection_probability_wide(w(1.5), w(0.1), 10).is_err());
    }

    #[test]
    fn two_step_inclusion_reaches_target() {
        // 10 exposures with chance 0.1, each followed by a rho' draw
        let (p, rho, s) = (0.5, 0.1, 10);
        let sel = selection_probability(p, rho, s).unwrap();
        let mut rng = rng_from_seed(11);
        let trials = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..trials {
            let included = (0..s).any(|_| rng.gen_bool(rho) && rng.gen_bool(sel));
            hits += included as u64;
        }
        let freq = hits as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * sigma, "{freq}");
    }

    #[test]
    fn expected_cells_plan() {
        let one = census_with(&[(3, 50.0, 9), (4, 7.0, 2)]);
        let plan = plan_expected_cells(&one, 5.0, 4).unwrap();
        assert_eq!(plan.len(), 1);
        assert!((plan[&3].to_f64() - 0.1).abs() < 1e-15);
        let zero = plan_expected_cells(&one, 0.0, 4).unwrap();
        assert!(zero[&3].is_zero());
        let two = census_with(&[(3, 100.0, 10), (5, 300.0, 10)]);
        let plan = plan_expected_cells(&two, 40.0, 4).unwrap();
        assert!((plan[&3].to_f64() - 0.2).abs() < 1e-15);
        assert!((plan[&5].to_f64() - 20.0 / 300.0).abs() < 1e-15);
        assert!(matches!(
            plan_expected_cells(&two, 40.0, 100),
            Err(Error::NoEligibleLengths { threshold: 100 })
        ));
        // capped at 1
        let small = census_with(&[(3, 2.0, 10)]);
        assert_eq!(plan_expected_cells(&small, 10.0, 0).unwrap()[&3], WideFloat::ONE);
    }

    fn uniform(pairs: &[(usize, f64)]) -> SamplingMode {
        SamplingMode::UniformProbability(pairs.iter().copied().collect())
    }

    #[test]
    fn zero_probabilities_give_no_cells() {
        let g = Graph::complete(6);
        let cfg = SamplingConfig::new(20, uniform(&[]), Approximation::Fast, 1);
        let (cc, report) = sample_lifting(&g, &cfg).unwrap();
        assert_eq!(cc.cell_count(), 0);
        assert_eq!(report.total_cells(), 0);
    }

    #[test]
    fn triangle_is_always_filled() {
        let cfg = SamplingConfig::new(1, uniform(&[(3, 1.0)]), Approximation::Fast, 9);
        let (cc, report) = sample_lifting(&Graph::complete(3), &cfg).unwrap();
        assert_eq!(cc.cells().len(), 1);
        assert_eq!(cc.cells()[0].nodes(), &[0, 1, 2]);
        assert!(report.undersampled_lengths.is_empty());
    }

    #[test]
    fn rejects_disconnected_and_bad_config() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let cfg = SamplingConfig::new(3, uniform(&[(3, 0.5)]), Approximation::Fast, 0);
        assert_eq!(sample_lifting(&g, &cfg).unwrap_err(), Error::Disconnected);
        let bad = SamplingConfig::new(3, uniform(&[(3, 1.5)]), Approximation::Fast, 0);
        assert!(sample_lifting(&Graph::complete(4), &bad).is_err());
        let none = SamplingConfig::new(
            3,
            SamplingMode::ExpectedCells { nu: 5.0, threshold: 1000 },
            Approximation::Fast,
            0,
        );
        assert!(matches!(
            sample_lifting(&Graph::complete(5), &none),
            Err(Error::NoEligibleLengths { .. })
        ));
    }

    #[test]
    fn deterministic_across_executors() {
        let g = crate::graph::GraphModel::ErdosRenyi { n: 25, p: 0.3 }.sample(4).unwrap();
        let mut cfg = SamplingConfig::new(
            40,
            SamplingMode::ExpectedCells { nu: 50.0, threshold: 4 },
            Approximation::Fast,
            17,
        );
        cfg.parallelism = Parallelism::Sequential;
        let a = sample_lifting(&g, &cfg).unwrap();
        cfg.parallelism = Parallelism::Parallel;
        let b = crate::exec::with_threads(3, || sample_lifting(&g, &cfg).unwrap());
        assert_eq!(a, b);
        for c in a.0.cells() {
            assert!(c.is_cycle_of(&g));
        }
    }

    #[test]
    fn undersampling_is_reported() {
        // one tree, P = 0.9 while a 4-cycle in K5 has rho well below 0.9
        let cfg = SamplingConfig::new(1, uniform(&[(4, 0.9)]), Approximation::Fast, 2);
        let (_, report) = sample_lifting(&Graph::complete(5), &cfg).unwrap();
        assert!(report.undersampled_lengths.contains(&4));
        assert!(report.undersampled_selections > 0);
    }
}
