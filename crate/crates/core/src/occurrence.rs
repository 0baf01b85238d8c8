//! Probability that a uniform spanning tree induces a given cycle.
//!
//! A tree induces a cycle `c` exactly when it contains one of the `l` paths
//! `c \ e`, and the probability of containing a path equals the probability
//! that a Laplacian random walk (LRW) between its ends takes it. The
//! closed-form approximations replace the LRW potentials by those of the
//! expected Erdős–Rényi graph, keeping only the degrees of the cycle nodes:
//!
//! ```text
//! rho ~ gamma(n, q, l) / prod_{w in c}(d(w) - 1)
//!       * sum_{(u,v) in c} tau_last(d(v')) (d(v) - 1)(d(v') - 1)
//! ```
//!
//! where the sum runs over the edges of the canonical traversal, `(u, v)` is
//! the removed edge, the walk goes from `u` around the cycle to `v`, and `v'`
//! is the node the walk visits just before `v`.

use serde::{Deserialize, Serialize};

use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::graph::{mle_edge_probability, Graph, Node};
use crate::linalg;
use crate::tree::PathComponents;
use crate::wide::WideFloat;

/// Which closed form to use for the occurrence probability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approximation {
    /// Keeps the degree of the second-to-last walk node in the last step.
    Estimated,
    /// Uses the expected degree in the last step; O(1) per cycle from the
    /// tree accumulators.
    #[default]
    Fast,
}

impl std::str::FromStr for Approximation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "estimated" => Ok(Approximation::Estimated),
            "fast" => Ok(Approximation::Fast),
            other => Err(Error::InvalidInput(format!("unknown approximation {other:?}"))),
        }
    }
}

impl std::fmt::Display for Approximation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approximation::Estimated => "estimated",
            Approximation::Fast => "fast",
        })
    }
}

/// Node count and assumed edge probability of the skeleton.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OccurrenceParams {
    pub n: usize,
    pub q: f64,
}

impl OccurrenceParams {
    pub fn new(n: usize, q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain(format!("edge probability {q} outside (0, 1]")));
        }
        Ok(OccurrenceParams { n, q })
    }

    /// Uses `p` when the generating model is known, otherwise the maximum
    /// likelihood density of `g`.
    pub fn for_graph(g: &Graph, p: Option<f64>) -> Result<Self> {
        let q = match p {
            Some(p) => p,
            None => mle_edge_probability(g)?,
        };
        Self::new(g.node_count(), q)
    }
}

fn check_length(n: usize, l: usize) -> Result<()> {
    if l < 3 || l > n {
        return Err(Error::Domain(format!("cycle length {l} outside [3, {n}]")));
    }
    Ok(())
}

/// Degree-free factor `((n-2)/n)^(l-3) * (n-1)/n * ((n-1)q - 1)/((n-1)q)`.
pub fn gamma(n: usize, q: f64, l: usize) -> Result<f64> {
    check_length(n, l)?;
    let expected_degree = (n as f64 - 1.0) * q;
    if !(q > 0.0 && q <= 1.0) || expected_degree <= 1.0 {
        return Err(Error::Domain(format!(
            "expected degree (n-1)q = {expected_degree} must exceed 1"
        )));
    }
    let nf = n as f64;
    Ok(((nf - 2.0) / nf).powi(l as i32 - 3)
        * ((nf - 1.0) / nf)
        * ((expected_degree - 1.0) / expected_degree))
}

/// Last LRW step probability `1 / (1 + (d_w - 2)/(n - 3) * (n - l)/l)`.
///
/// At `l = n` the correction vanishes and the value is 1 for every `n`,
/// including the triangle `n = 3`.
pub fn tau_last_estimated(d_w: f64, n: usize, l: usize) -> Result<f64> {
    check_length(n, l)?;
    if l == n {
        return Ok(1.0);
    }
    if n <= 3 {
        return Err(Error::Domain(format!("last-step approximation needs n > 3, got {n}")));
    }
    let correction = (d_w - 2.0) / (n as f64 - 3.0) * ((n - l) as f64 / l as f64);
    Ok(1.0 / (1.0 + correction))
}

/// [`tau_last_estimated`] at the expected degree `(n - 1) q`.
pub fn tau_last_approx(n: usize, q: f64, l: usize) -> Result<f64> {
    tau_last_estimated((n as f64 - 1.0) * q, n, l)
}

fn degree_factor(g: &Graph, w: Node) -> f64 {
    let d = g.degree(w);
    assert!(d >= 2, "cycle node {w} has degree {d}");
    (d - 1) as f64
}

fn check_cycle(c: &Cycle, g: &Graph) -> Result<()> {
    if !c.is_cycle_of(g) {
        return Err(Error::Validation(format!("{:?} is not a cycle of the graph", c.nodes())));
    }
    Ok(())
}

/// Unclamped estimate with the per-edge last-step degree.
pub fn rho_estimated_raw(c: &Cycle, g: &Graph, params: OccurrenceParams) -> Result<f64> {
    rho_estimated_wide(c, g, params).map(WideFloat::to_f64)
}

/// [`rho_estimated_raw`] without leaving the extended range.
pub fn rho_estimated_wide(c: &Cycle, g: &Graph, params: OccurrenceParams) -> Result<WideFloat> {
    check_cycle(c, g)?;
    let nodes = c.nodes();
    let l = nodes.len();
    let g_factor = gamma(params.n, params.q, l)?;
    let mut sum = 0.0;
    let mut product = WideFloat::ONE;
    for i in 0..l {
        let v = nodes[(i + 1) % l];
        let v_prev = nodes[(i + 2) % l];
        let tau = tau_last_estimated(g.degree(v_prev) as f64, params.n, l)?;
        sum += tau * degree_factor(g, v) * degree_factor(g, v_prev);
        product = product * WideFloat::new(degree_factor(g, nodes[i]));
    }
    Ok(WideFloat::new(sum * g_factor) / product)
}

/// Unclamped estimate with the last step at the expected degree.
pub fn rho_approx_raw(c: &Cycle, g: &Graph, params: OccurrenceParams) -> Result<f64> {
    check_cycle(c, g)?;
    let mut sigma = 0.0;
    let mut product = WideFloat::ONE;
    for (a, b) in c.edges() {
        sigma += degree_factor(g, a) * degree_factor(g, b);
        product = product * WideFloat::new(degree_factor(g, a));
    }
    rho_approx_from_components(sigma, product, params, c.len())
}

/// The fast estimate from an edge sum and node product over the cycle.
pub fn rho_approx_from_components(
    sigma_cycle: f64,
    pi_cycle: WideFloat,
    params: OccurrenceParams,
    l: usize,
) -> Result<f64> {
    rho_approx_wide(sigma_cycle, pi_cycle, params, l).map(WideFloat::to_f64)
}

pub fn rho_approx_wide(
    sigma_cycle: f64,
    pi_cycle: WideFloat,
    params: OccurrenceParams,
    l: usize,
) -> Result<WideFloat> {
    let factor = gamma(params.n, params.q, l)? * tau_last_approx(params.n, params.q, l)?;
    Ok(WideFloat::new(sigma_cycle * factor) / pi_cycle)
}

pub fn rho_approx_from_path(pc: &PathComponents, params: OccurrenceParams) -> Result<WideFloat> {
    rho_approx_wide(pc.sigma_cycle, pc.pi_cycle, params, pc.length)
}

/// Clamps a raw estimate into `(0, 1]`; the flag reports a value above 1.
pub fn clamp_probability(raw: f64) -> (f64, bool) {
    if raw > 1.0 {
        (1.0, true)
    } else if raw > 0.0 {
        (raw, false)
    } else {
        (f64::MIN_POSITIVE, false)
    }
}

/// [`clamp_probability`] on the extended range; only zero is lifted.
pub fn clamp_probability_wide(raw: WideFloat) -> (WideFloat, bool) {
    if raw > WideFloat::ONE {
        (WideFloat::ONE, true)
    } else if raw > WideFloat::ZERO {
        (raw, false)
    } else {
        (WideFloat::new(f64::MIN_POSITIVE), false)
    }
}

pub fn rho_estimated(c: &Cycle, g: &Graph, params: OccurrenceParams) -> Result<f64> {
    rho_estimated_raw(c, g, params).map(|r| clamp_probability(r).0)
}

pub fn rho_approx(c: &Cycle, g: &Graph, params: OccurrenceParams) -> Result<f64> {
    rho_approx_raw(c, g, params).map(|r| clamp_probability(r).0)
}

/// Exact occurrence probability from Laplacian random walks.
///
/// For each edge `(u, v)` of the canonical traversal the walk starts at `u`
/// and must follow the cycle the long way round to `v`. Each step solves
/// the Dirichlet problem with `f(v) = 1` and `f = 0` on visited nodes; the
/// step probability is `f(next) / sum of f over the current neighbors`.
/// Only practical for small graphs.
pub fn rho_exact_lrw(c: &Cycle, g: &Graph) -> Result<f64> {
    check_cycle(c, g)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let nodes = c.nodes();
    let l = nodes.len();
    let mut total = 0.0;
    for i in 0..l {
        // walk u = nodes[i], nodes[i-1], ..., nodes[i+1] = v
        let path: Vec<Node> = (0..l).map(|k| nodes[(i + l - k) % l]).collect();
        total += lrw_path_probability(g, &path);
    }
    Ok(total)
}

/// Probability that the LRW from `path[0]` to its last node follows `path`.
pub fn lrw_path_probability(g: &Graph, path: &[Node]) -> f64 {
    let n = g.node_count();
    let target = *path.last().expect("non-empty path");
    let mut visited = vec![false; n];
    let mut prob = 1.0;
    for step in 0..path.len() - 1 {
        let cur = path[step];
        visited[cur] = true;
        let Some(f) = harmonic_potential(g, &visited, target) else {
            return 0.0;
        };
        let denom: f64 = g.neighbors(cur).iter().map(|&x| f[x]).sum();
        if denom <= 0.0 {
            return 0.0;
        }
        prob *= f[path[step + 1]] / denom;
        if prob == 0.0 {
            return 0.0;
        }
    }
    prob
}

fn harmonic_potential(g: &Graph, visited: &[bool], target: Node) -> Option<Vec<f64>> {
    let n = g.node_count();
    let free: Vec<Node> = (0..n).filter(|&w| !visited[w] && w != target).collect();
    let mut slot = vec![usize::MAX; n];
    for (i, &w) in free.iter().enumerate() {
        slot[w] = i;
    }
    let k = free.len();
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for (i, &w) in free.iter().enumerate() {
        a[i][i] = g.degree(w) as f64;
        for &x in g.neighbors(w) {
            if x == target {
                b[i] += 1.0;
            } else if slot[x] != usize::MAX {
                a[i][slot[x]] -= 1.0;
            }
        }
    }
    let x = linalg::solve(a, b)?;
    let mut f = vec![0.0; n];
    f[target] = 1.0;
    for (i, &w) in free.iter().enumerate() {
        f[w] = x[i];
    }
    Some(f)
}
