//! Reference implementations used to validate the approximations.
//!
//! These are exact or brute force and only practical on small graphs.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Parallelism};
use crate::graph::{Graph, Node};
use crate::linalg::{determinant_bareiss, log_abs_determinant};
use crate::seed::{derive_seed, rng_from_seed, stream};
use crate::tree::{induced_cycle, wilson_ust, RootedSpanningTree};

/// Kirchhoff count of spanning trees of a multigraph on `n` nodes given as
/// an edge list; loops are ignored.
pub fn multigraph_tree_count(n: usize, edges: &[(Node, Node)]) -> BigUint {
    if n <= 1 {
        return BigUint::from(1u32);
    }
    let mut lap = vec![vec![BigInt::zero(); n - 1]; n - 1];
    for &(u, v) in edges {
        if u == v {
            continue;
        }
        for (a, b) in [(u, v), (v, u)] {
            if a < n - 1 {
                lap[a][a] += 1;
                if b < n - 1 {
                    lap[a][b] -= 1;
                }
            }
        }
    }
    determinant_bareiss(lap).to_biguint().unwrap_or_default()
}

/// `t(G)`; zero for disconnected graphs.
pub fn spanning_tree_count(g: &Graph) -> BigUint {
    multigraph_tree_count(g.node_count(), g.edges())
}

/// Edges of `g` with the nodes of `c` merged into a single node, renumbered
/// densely. Edges inside the merged set become loops and are dropped.
fn contract_cycle_nodes(g: &Graph, c: &Cycle) -> (usize, Vec<(Node, Node)>) {
    let n = g.node_count();
    let mut on_cycle = vec![false; n];
    for &v in c.nodes() {
        on_cycle[v] = true;
    }
    let mut label = vec![0; n];
    let mut next = 1;
    for v in 0..n {
        if !on_cycle[v] {
            label[v] = next;
            next += 1;
        }
    }
    let edges = g
        .edges()
        .iter()
        .map(|&(u, v)| (label[u], label[v]))
        .filter(|&(a, b)| a != b)
        .collect();
    (next, edges)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCountReport {
    pub total_trees: BigUint,
    pub trees_containing: BigUint,
}

fn check_cycle(g: &Graph, c: &Cycle) -> Result<()> {
    if !c.is_cycle_of(g) {
        return Err(Error::InvalidInput(format!("{:?} is not a cycle of the graph", c.nodes())));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// `|T_c|` and `t(G)`.
///
/// A tree induces `c` exactly when it contains one of the paths `c \ e`.
/// Those events are disjoint, and the trees containing a given path are the
/// spanning trees of `G` with the path contracted. Every such contraction
/// merges the same node set, so each of the `l` terms equals `t(G / V(c))`.
pub fn tree_count_report(g: &Graph, c: &Cycle) -> Result<TreeCountReport> {
    check_cycle(g, c)?;
    let (n, edges) = contract_cycle_nodes(g, c);
    let per_path = multigraph_tree_count(n, &edges);
    Ok(TreeCountReport {
        total_trees: spanning_tree_count(g),
        trees_containing: per_path * BigUint::from(c.len()),
    })
}

/// Exact occurrence probability `|T_c| / t(G)`.
pub fn rho_exact_matrix_tree(g: &Graph, c: &Cycle) -> Result<BigRational> {
    let report = tree_count_report(g, c)?;
    Ok(BigRational::new(report.trees_containing.into(), report.total_trees.into()))
}

fn log_tree_count(n: usize, edges: &[(Node, Node)]) -> Option<f64> {
    if n <= 1 {
        return Some(0.0);
    }
    let mut lap = vec![vec![0.0; n - 1]; n - 1];
    for &(u, v) in edges {
        for (a, b) in [(u, v), (v, u)] {
            if a < n - 1 {
                lap[a][a] += 1.0;
                if b < n - 1 {
                    lap[a][b] -= 1.0;
                }
            }
        }
    }
    log_abs_determinant(lap)
}

/// Floating-point matrix-tree occurrence probability via log-determinants,
/// for graphs where the exact determinant is too slow.
pub fn rho_matrix_tree_f64(g: &Graph, c: &Cycle) -> Result<f64> {
    check_cycle(g, c)?;
    let (n, edges) = contract_cycle_nodes(g, c);
    let numerator = log_tree_count(n, &edges)
        .ok_or_else(|| Error::Domain("contracted Laplacian is singular".into()))?;
    let denominator = log_tree_count(g.node_count(), g.edges())
        .ok_or_else(|| Error::Domain("Laplacian is singular".into()))?;
    Ok(((c.len() as f64).ln() + numerator - denominator).exp())
}

/// Whether the tree with these edges induces `c`: it holds `l - 1` of the
/// cycle's edges.
pub fn tree_induces(tree_edges: &[(Node, Node)], c: &Cycle) -> bool {
    let held = c
        .edges()
        .filter(|&(a, b)| {
            let e = (a.min(b), a.max(b));
            tree_edges.binary_search(&e).is_ok()
        })
        .count();
    held + 1 == c.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub rho: f64,
    pub std_error: f64,
    pub hits: u64,
    pub trials: u64,
}

/// Fraction of sampled uniform spanning trees that induce `c`.
pub fn rho_monte_carlo(
    g: &Graph,
    c: &Cycle,
    trials: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<MonteCarloEstimate> {
    check_cycle(g, c)?;
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    let outcomes = map_indexed(parallelism, trials as usize, |i| -> Result<bool> {
        let t = wilson_ust(g, 0, derive_seed(seed, stream::TRIAL, i as u64))?;
        Ok(tree_induces(&t.edges(), c))
    });
    let mut hits = 0u64;
    for o in outcomes {
        hits += o? as u64;
    }
    let rho = hits as f64 / trials as f64;
    Ok(MonteCarloEstimate {
        rho,
        std_error: (rho * (1.0 - rho) / trials as f64).sqrt(),
        hits,
        trials,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionSample {
    pub cells: Vec<Cycle>,
    pub attempts: u64,
    /// Set when `max_attempts` ran out before `count` cells were accepted.
    pub shortfall: bool,
}

/// Draws ordered `l`-tuples of distinct nodes uniformly and keeps those that
/// trace a cycle of `g`. Each `l`-cycle has `2l` tuples, so accepted cells
/// are uniform over the `l`-cycles; repeats are kept.
pub fn rejection_sample_cells(
    g: &Graph,
    l: usize,
    count: usize,
    seed: u64,
    max_attempts: u64,
) -> Result<RejectionSample> {
    let n = g.node_count();
    if l < 3 || l > n {
        return Err(Error::InvalidInput(format!("cycle length {l} outside [3, {n}]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut nodes: Vec<Node> = (0..n).collect();
    let mut cells = Vec::with_capacity(count.min(max_attempts.min(1 << 20) as usize));
    let mut attempts = 0;
    while cells.len() < count && attempts < max_attempts {
        attempts += 1;
        let (tuple, _) = nodes.partial_shuffle(&mut rng, l);
        let closed = (0..l).all(|i| g.has_edge(tuple[i], tuple[(i + 1) % l]));
        if closed {
            cells.push(Cycle::new(tuple.to_vec())?);
        }
    }
    Ok(RejectionSample { shortfall: cells.len() < count, cells, attempts })
}

/// Every spanning tree of `g` as a sorted edge list, by deletion and
/// contraction over the edges in index order. Refuses when `t(G)` exceeds
/// `budget`.
pub fn enumerate_spanning_trees(g: &Graph, budget: u64) -> Result<Vec<Vec<(Node, Node)>>> {
    let total = spanning_tree_count(g);
    if total.is_zero() {
        return Err(Error::Disconnected);
    }
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded { budget });
    }
    let n = g.node_count();
    let mut out = Vec::with_capacity(total.to_usize().unwrap_or(0));
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    let mut comp: Vec<Node> = (0..n).collect();
    grow(g, 0, &mut comp, &mut chosen, &mut out);
    debug_assert_eq!(BigUint::from(out.len()), total);
    Ok(out)
}

fn grow(
    g: &Graph,
    next: usize,
    comp: &mut Vec<Node>,
    chosen: &mut Vec<(Node, Node)>,
    out: &mut Vec<Vec<(Node, Node)>>,
) {
    let n = g.node_count();
    if chosen.len() + 1 == n || n <= 1 {
        out.push(chosen.clone());
        return;
    }
    if next == g.edge_count() || !completable(g, next, comp) {
        return;
    }
    let (u, v) = g.edges()[next];
    if comp[u] != comp[v] {
        // contract: take the edge
        let saved = comp.clone();
        let (keep, drop) = (comp[u].min(comp[v]), comp[u].max(comp[v]));
        for x in comp.iter_mut() {
            if *x == drop {
                *x = keep;
            }
        }
        chosen.push((u, v));
        grow(g, next + 1, comp, chosen, out);
        chosen.pop();
        *comp = saved;
    }
    // delete: skip the edge
    grow(g, next + 1, comp, chosen, out);
}

/// Whether the current components can still be joined by edges `next..`.
fn completable(g: &Graph, next: usize, comp: &[Node]) -> bool {
    let n = g.node_count();
    let mut parent: Vec<Node> = (0..n).collect();
    fn find(p: &mut [Node], mut x: Node) -> Node {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut groups = n;
    let join = |p: &mut Vec<Node>, a: Node, b: Node, groups: &mut usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra] = rb;
            *groups -= 1;
        }
    };
    for v in 0..n {
        join(&mut parent, v, comp[v], &mut groups);
    }
    for &(u, v) in &g.edges()[next..] {
        join(&mut parent, u, v, &mut groups);
    }
    groups == 1
}

/// Every simple cycle of `g` in canonical form, sorted. `budget` caps the
/// search as in [`crate::census::exact_counts`].
pub fn simple_cycles(g: &Graph, budget: u64) -> Result<Vec<Cycle>> {
    let mut out = Vec::new();
    crate::census::visit_simple_cycles(g, g.node_count(), budget, |path| {
        out.push(Cycle::new(path.to_vec()).expect("simple cycle"));
    })?;
    out.sort();
    Ok(out)
}

/// Cycles induced by the spanning tree with the given edges, in the order
/// of the non-tree edges.
pub fn induced_cycles(g: &Graph, tree_edges: &[(Node, Node)]) -> Result<Vec<Cycle>> {
    let tree = tree_from_edges(g, tree_edges)?;
    let mut sorted = tree_edges.to_vec();
    sorted.sort_unstable();
    g.edges()
        .iter()
        .filter(|e| sorted.binary_search(e).is_err())
        .map(|&(u, v)| induced_cycle(&tree, u, v))
        .collect()
}

/// Roots the spanning tree given by `tree_edges` at node 0.
pub fn tree_from_edges(g: &Graph, tree_edges: &[(Node, Node)]) -> Result<RootedSpanningTree> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in tree_edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parents = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                parents[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    RootedSpanningTree::from_parents(g, 0, &parents)
}
