//! Uniform spanning trees and the rooted-tree accumulators that make the
//! fast occurrence approximation constant time per non-tree edge.
//!
//! For a root `r` the accumulators are
//!
//! ```text
//! pi(r, r)    = d(r) - 1                  sigma(r, r) = 0
//! pi(r, u)    = pi(r, v) * (d(u) - 1)     sigma(r, u) = sigma(r, v) + (d(v) - 1)(d(u) - 1)
//! ```
//!
//! where `v` is the parent of `u`. A tree path `u ~ v` through `w = lca(u, v)`
//! then has node product `pi(r,u) pi(r,v) (d(w)-1) / pi(r,w)^2` and edge sum
//! `sigma(r,u) + sigma(r,v) - 2 sigma(r,w)`.

use rand::Rng as _;

use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::graph::{Graph, Node};
use crate::seed::{rng_from_seed, Rng};
use crate::wide::WideFloat;

const NO_PARENT: Node = Node::MAX;

/// Degree factor `d - 1` used by the accumulators. Degree-one nodes never lie
/// on a cycle; they contribute a unit factor so a degree-one root does not
/// zero out every product.
fn pi_factor(degree: usize) -> f64 {
    if degree <= 1 {
        1.0
    } else {
        (degree - 1) as f64
    }
}

#[derive(Clone, Debug)]
pub struct RootedSpanningTree {
    root: Node,
    parent: Vec<Node>,
    depth: Vec<usize>,
    /// Nodes in breadth-first order from the root.
    order: Vec<Node>,
    children_start: Vec<usize>,
    children: Vec<Node>,
    degree: Vec<usize>,
    sigma: Vec<f64>,
    pi: Vec<WideFloat>,
}

/// Accumulator values for the cycle closed by a non-tree edge `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathComponents {
    /// Edge sum over the tree path only.
    pub sigma_path: f64,
    /// `sigma_path + (d(u)-1)(d(v)-1)`: the edge sum over the whole cycle.
    pub sigma_cycle: f64,
    /// Node product over the tree path, which covers every node of the cycle.
    pub pi_cycle: WideFloat,
    /// Number of nodes on the cycle.
    pub length: usize,
}

impl RootedSpanningTree {
    /// Builds a tree from a parent array (`parent[root]` is ignored).
    /// Degrees come from `g`; every parent link must be an edge of `g`.
    pub fn from_parents(g: &Graph, root: Node, parents: &[Option<Node>]) -> Result<Self> {
        let n = g.node_count();
        if parents.len() != n || root >= n {
            return Err(Error::InvalidInput("parent array does not match graph".into()));
        }
        let mut parent = vec![NO_PARENT; n];
        for u in 0..n {
            if u == root {
                continue;
            }
            match parents[u] {
                Some(p) if p < n && g.has_edge(u, p) => parent[u] = p,
                Some(p) => {
                    return Err(Error::Validation(format!(
                        "parent link ({u}, {p}) is not an edge of the graph"
                    )))
                }
                None => return Err(Error::Validation(format!("node {u} has no parent"))),
            }
        }
        Self::build(g, root, parent)
    }

    fn build(g: &Graph, root: Node, parent: Vec<Node>) -> Result<Self> {
        let n = g.node_count();
        let mut child_count = vec![0usize; n];
        for u in 0..n {
            if u != root {
                child_count[parent[u]] += 1;
            }
        }
        let mut children_start = vec![0usize; n + 1];
        for u in 0..n {
            children_start[u + 1] = children_start[u] + child_count[u];
        }
        let mut fill = children_start.clone();
        let mut children = vec![0; n.saturating_sub(1)];
        for u in 0..n {
            if u != root {
                let p = parent[u];
                children[fill[p]] = u;
                fill[p] += 1;
            }
        }

        let degree = g.degrees();
        let mut depth = vec![0usize; n];
        let mut sigma = vec![0.0; n];
        let mut pi = vec![WideFloat::ONE; n];
        let mut order = Vec::with_capacity(n);
        pi[root] = WideFloat::new(pi_factor(degree[root]));
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &u in &children[children_start[v]..children_start[v + 1]] {
                depth[u] = depth[v] + 1;
                pi[u] = pi[v] * WideFloat::new(pi_factor(degree[u]));
                sigma[u] = sigma[v]
                    + (degree[v] as f64 - 1.0) * (degree[u] as f64 - 1.0);
                order.push(u);
            }
        }
        if order.len() != n {
            return Err(Error::Validation("parent links do not form a spanning tree".into()));
        }
        Ok(RootedSpanningTree {
            root,
            parent,
            depth,
            order,
            children_start,
            children,
            degree,
            sigma,
            pi,
        })
    }

    pub fn root(&self) -> Node {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, u: Node) -> Option<Node> {
        (u != self.root).then(|| self.parent[u])
    }

    pub fn depth(&self, u: Node) -> usize {
        self.depth[u]
    }

    pub fn children(&self, u: Node) -> &[Node] {
        &self.children[self.children_start[u]..self.children_start[u + 1]]
    }

    pub fn sigma_to_root(&self, u: Node) -> f64 {
        self.sigma[u]
    }

    pub fn pi_to_root(&self, u: Node) -> WideFloat {
        self.pi[u]
    }

    pub fn is_tree_edge(&self, u: Node, v: Node) -> bool {
        (u != self.root && self.parent[u] == v) || (v != self.root && self.parent[v] == u)
    }

    /// Tree edges as `(min, max)` pairs, sorted.
    pub fn edges(&self) -> Vec<(Node, Node)> {
        let mut edges: Vec<_> = (0..self.node_count())
            .filter(|&u| u != self.root)
            .map(|u| (u.min(self.parent[u]), u.max(self.parent[u])))
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Nodes in breadth-first order from the root.
    pub fn bfs_order(&self) -> &[Node] {
        &self.order
    }

    /// Lowest common ancestor by walking parent links; O(depth).
    pub fn lca_naive(&self, mut u: Node, mut v: Node) -> Node {
        while self.depth[u] > self.depth[v] {
            u = self.parent[u];
        }
        while self.depth[v] > self.depth[u] {
            v = self.parent[v];
        }
        while u != v {
            u = self.parent[u];
            v = self.parent[v];
        }
        u
    }
}

/// Samples a uniform spanning tree with Wilson's algorithm, rooted at `root`.
///
/// Nodes are added in increasing id order; each loop-erased walk is recorded
/// through its last exit pointer. The distribution over unrooted trees does
/// not depend on the root.
pub fn wilson_ust(g: &Graph, root: Node, seed: u64) -> Result<RootedSpanningTree> {
    wilson_ust_with_rng(g, root, &mut rng_from_seed(seed))
}

pub fn wilson_ust_with_rng(g: &Graph, root: Node, rng: &mut Rng) -> Result<RootedSpanningTree> {
    let n = g.node_count();
    if root >= n {
        return Err(Error::InvalidInput(format!("root {root} outside 0..{n}")));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut in_tree = vec![false; n];
    let mut next = vec![NO_PARENT; n];
    in_tree[root] = true;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let nbrs = g.neighbors(u);
            next[u] = nbrs[rng.gen_range(0..nbrs.len())];
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u];
        }
    }
    RootedSpanningTree::build(g, root, next)
}

/// Tarjan's offline lowest-common-ancestor algorithm.
///
/// One depth-first pass over the tree with a union-find forest; answers come
/// back in query order. Runs in `O(n + q α(n))`.
pub fn offline_lca(tree: &RootedSpanningTree, queries: &[(Node, Node)]) -> Vec<Node> {
    let n = tree.node_count();
    // queries bucketed by endpoint, CSR layout
    let mut start = vec![0usize; n + 1];
    for &(a, b) in queries {
        start[a + 1] += 1;
        start[b + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut bucket = vec![(0usize, 0usize); 2 * queries.len()];
    for (qi, &(a, b)) in queries.iter().enumerate() {
        bucket[fill[a]] = (b, qi);
        fill[a] += 1;
        bucket[fill[b]] = (a, qi);
        fill[b] += 1;
    }

    let mut uf = UnionFind::new(n);
    let mut ancestor: Vec<Node> = (0..n).collect();
    let mut done = vec![false; n];
    let mut answer = vec![NO_PARENT; queries.len()];

    // (node, next child offset)
    let mut stack: Vec<(Node, usize)> = vec![(tree.root, 0)];
    while let Some(&mut (u, ref mut offset)) = stack.last_mut() {
        let kids = tree.children(u);
        if *offset < kids.len() {
            let child = kids[*offset];
            *offset += 1;
            stack.push((child, 0));
            continue;
        }
        stack.pop();
        done[u] = true;
        for &(other, qi) in &bucket[start[u]..start[u + 1]] {
            if done[other] && answer[qi] == NO_PARENT {
                answer[qi] = ancestor[uf.find(other)];
            }
        }
        if let Some(&(p, _)) = stack.last() {
            uf.union(p, u);
            let r = uf.find(p);
            ancestor[r] = p;
        }
    }
    answer
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Sum and product components of the cycle closed by `(u, v)`, O(1) given
/// the precomputed `lca` of the pair.
pub fn path_components(t: &RootedSpanningTree, u: Node, v: Node, lca: Node) -> PathComponents {
    debug_assert_ne!(u, v);
    let sigma_path = t.sigma[u] + t.sigma[v] - 2.0 * t.sigma[lca];
    let closing = (t.degree[u] as f64 - 1.0) * (t.degree[v] as f64 - 1.0);
    let pi_lca = t.pi[lca];
    let pi_cycle =
        t.pi[u] * t.pi[v] * WideFloat::new(pi_factor(t.degree[lca])) / (pi_lca * pi_lca);
    PathComponents {
        sigma_path,
        sigma_cycle: sigma_path + closing,
        pi_cycle,
        length: t.depth[u] + t.depth[v] - 2 * t.depth[lca] + 1,
    }
}

/// The cycle formed by the tree path from `u` to `v` plus the edge `(v, u)`.
pub fn induced_cycle(t: &RootedSpanningTree, u: Node, v: Node) -> Result<Cycle> {
    let lca = t.lca_naive(u, v);
    induced_cycle_with_lca(t, u, v, lca)
}

pub fn induced_cycle_with_lca(t: &RootedSpanningTree, u: Node, v: Node, lca: Node) -> Result<Cycle> {
    if u == v || t.is_tree_edge(u, v) {
        return Err(Error::InvalidInput(format!("({u}, {v}) does not close a cycle in the tree")));
    }
    let mut nodes = Vec::new();
    let mut a = u;
    while a != lca {
        nodes.push(a);
        a = t.parent[a];
    }
    nodes.push(lca);
    let mark = nodes.len();
    let mut b = v;
    while b != lca {
        nodes.push(b);
        b = t.parent[b];
    }
    nodes[mark..].reverse();
    Cycle::new(nodes)
}

/// A non-tree edge together with the lowest common ancestor of its ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonTreeEdge {
    pub edge_index: usize,
    pub u: Node,
    pub v: Node,
    pub lca: Node,
}

/// Every non-tree edge of `g` in edge-index order, with batched LCAs.
pub fn non_tree_edges(g: &Graph, t: &RootedSpanningTree) -> Vec<NonTreeEdge> {
    let pairs: Vec<(usize, (Node, Node))> = g
        .edges()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, (u, v))| !t.is_tree_edge(u, v))
        .collect();
    let queries: Vec<(Node, Node)> = pairs.iter().map(|&(_, e)| e).collect();
    let lcas = offline_lca(t, &queries);
    pairs
        .into_iter()
        .zip(lcas)
        .map(|((edge_index, (u, v)), lca)| NonTreeEdge { edge_index, u, v, lca })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphModel;
    use std::collections::HashMap;

    /// The eight-node worked example: rooted at 2, path 2-1-4-0 and 1-3,
    /// with the non-tree edge (0, 3) closing the cycle (0, 3, 1, 4).
    fn toy() -> (Graph, RootedSpanningTree) {
        let g = Graph::from_edges(
            8,
            [
                (0, 3), (0, 4), (0, 7), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6),
                (2, 4), (2, 5), (2, 6), (2, 7), (3, 5), (3, 7), (4, 6),
            ],
        )
        .unwrap();
        let parents = [Some(4), Some(2), None, Some(1), Some(1), Some(2), Some(2), Some(2)];
        let t = RootedSpanningTree::from_parents(&g, 2, &parents).unwrap();
        (g, t)
    }

    #[test]
    fn toy_accumulators() {
        let (_, t) = toy();
        assert_eq!(
            [t.sigma_to_root(0), t.sigma_to_root(3), t.sigma_to_root(1)],
            [34.0, 28.0, 16.0]
        );
        assert_eq!(
            [t.pi_to_root(0).to_f64(), t.pi_to_root(3).to_f64(), t.pi_to_root(1).to_f64()],
            [96.0, 48.0, 16.0]
        );
        assert_eq!(offline_lca(&t, &[(0, 3)]), vec![1]);
        let pc = path_components(&t, 0, 3, 1);
        assert_eq!(pc.sigma_path, 30.0);
        assert_eq!(pc.sigma_cycle, 36.0);
        assert_eq!(pc.pi_cycle.to_f64(), 72.0);
        assert_eq!(pc.length, 4);
        assert_eq!(induced_cycle(&t, 0, 3).unwrap().nodes(), &[0, 3, 1, 4]);
    }

    #[test]
    fn lca_basics() {
        let (_, t) = toy();
        let q = [(5, 5), (0, 2), (2, 7), (0, 6), (4, 3), (0, 4)];
        assert_eq!(offline_lca(&t, &q), vec![5, 2, 2, 2, 1, 4]);
    }

    #[test]
    fn lca_matches_naive_on_random_trees() {
        for seed in 0..20 {
            let g = GraphModel::ErdosRenyi { n: 40, p: 0.15 }.sample(seed).unwrap();
            if !g.is_connected() {
                continue;
            }
            let t = wilson_ust(&g, 0, seed).unwrap();
            let queries: Vec<_> = (0..40).flat_map(|a| (0..40).map(move |b| (a, b))).collect();
            let fast = offline_lca(&t, &queries);
            for (&(a, b), &w) in queries.iter().zip(&fast) {
                assert_eq!(w, t.lca_naive(a, b));
            }
        }
    }

    #[test]
    fn path_graph_has_one_tree() {
        let g = Graph::path(3);
        for seed in 0..10 {
            let t = wilson_ust(&g, 0, seed).unwrap();
            assert_eq!(t.edges(), vec![(0, 1), (1, 2)]);
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(wilson_ust(&g, 0, 1).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn k3_trees_are_uniform() {
        let g = Graph::complete(3);
        let samples = 10_000;
        let mut counts: HashMap<Vec<(Node, Node)>, usize> = HashMap::new();
        for s in 0..samples {
            *counts.entry(wilson_ust(&g, 0, s).unwrap().edges()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        let sd = (samples as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - samples as f64 / 3.0).abs() < 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn k4_trees_pass_chi_square() {
        let g = Graph::complete(4);
        let samples = 50_000u64;
        let mut counts: HashMap<Vec<(Node, Node)>, u64> = HashMap::new();
        for s in 0..samples {
            *counts.entry(wilson_ust(&g, 0, s).unwrap().edges()).or_default() += 1;
        }
        assert_eq!(counts.len(), 16);
        let expected = samples as f64 / 16.0;
        let chi2: f64 =
            counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square critical value, 15 degrees of freedom, alpha = 0.01
        assert!(chi2 < 30.578, "chi2 = {chi2}");
    }

    #[test]
    fn non_tree_edge_count_is_cycle_rank() {
        for seed in 0..10 {
            let g = GraphModel::ErdosRenyi { n: 25, p: 0.3 }.sample(seed).unwrap();
            if !g.is_connected() {
                continue;
            }
            let t = wilson_ust(&g, 0, seed).unwrap();
            assert_eq!(non_tree_edges(&g, &t).len(), g.edge_count() - g.node_count() + 1);
        }
    }

    #[test]
    fn accumulators_match_brute_force_on_every_cycle() {
        for seed in 0..40u64 {
            let n = 5 + (seed as usize % 8);
            let g = GraphModel::ErdosRenyi { n, p: 0.5 }.sample(seed).unwrap();
            if !g.is_connected() {
                continue;
            }
            let t = wilson_ust(&g, (seed as usize) % n, seed + 100).unwrap();
            for e in non_tree_edges(&g, &t) {
                let c = induced_cycle_with_lca(&t, e.u, e.v, e.lca).unwrap();
                assert!(c.is_cycle_of(&g));
                let d = |w: Node| g.degree(w) as f64 - 1.0;
                let sigma: f64 = c.edges().map(|(a, b)| d(a) * d(b)).sum();
                let pi: f64 = c.nodes().iter().map(|&w| d(w)).product();
                let pc = path_components(&t, e.u, e.v, e.lca);
                assert_eq!(pc.length, c.len());
                assert_eq!(pc.sigma_cycle, sigma);
                assert!((pc.pi_cycle.to_f64() - pi).abs() <= 1e-12 * pi);
            }
        }
    }

    #[test]
    fn square_and_triangle_cycles() {
        let tri = Graph::complete(3);
        let t = RootedSpanningTree::from_parents(&tri, 0, &[None, Some(0), Some(1)]).unwrap();
        assert_eq!(induced_cycle(&t, 0, 2).unwrap().nodes(), &[0, 1, 2]);
        assert!(induced_cycle(&t, 0, 1).is_err());

        let sq = Graph::cycle(4);
        let t = RootedSpanningTree::from_parents(&sq, 0, &[None, Some(0), Some(1), Some(2)])
            .unwrap();
        assert_eq!(induced_cycle(&t, 0, 3).unwrap().nodes(), &[0, 1, 2, 3]);
    }

    #[test]
    fn from_parents_rejects_cycles_and_non_edges() {
        let g = Graph::complete(3);
        assert!(RootedSpanningTree::from_parents(&g, 0, &[None, Some(2), Some(1)]).is_err());
        let p = Graph::path(3);
        assert!(RootedSpanningTree::from_parents(&p, 0, &[None, Some(0), Some(0)]).is_err());
    }

    #[test]
    fn adjacent_pair_below_root_matches_explicit_path() {
        // root 0 with children 1 and 2, plus the non-tree edge (1, 2)
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (0, 3)]).unwrap();
        let t = RootedSpanningTree::from_parents(
            &g,
            0,
            &[None, Some(0), Some(0), Some(1), Some(2)],
        )
        .unwrap();
        let pc = path_components(&t, 1, 2, 0);
        let d = |w: Node| g.degree(w) as f64 - 1.0;
        assert_eq!(pc.sigma_path, d(1) * d(0) + d(0) * d(2));
        assert_eq!(pc.pi_cycle.to_f64(), d(1) * d(0) * d(2));
    }
}
