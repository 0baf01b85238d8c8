//! Simple undirected graphs, random graph models, and the edge-list format.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

pub type Node = usize;

/// A simple undirected graph on the dense node set `0..n`.
///
/// Adjacency lists are sorted and the edge list holds every edge once as
/// `(u, v)` with `u < v`, in lexicographic order. The position of an edge in
/// that list is its index (used as the column id of boundary matrices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<Node>>,
    edges: Vec<(Node, Node)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n], edges: Vec::new() }
    }

    /// Builds a graph from arbitrary edge pairs. Reversed and repeated pairs
    /// collapse into one edge; self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop on node {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted_edges(n, list))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(Node, Node)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph { adjacency, edges }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_sorted_edges(n, edges)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
        Self::from_sorted_edges(a + b, edges)
    }

    /// The cycle graph `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (0..n.saturating_sub(1)).map(|u| (u, u + 1)).collect();
        if n >= 3 {
            edges.push((0, n - 1));
        }
        edges.sort_unstable();
        Self::from_sorted_edges(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_edges(n, (0..n.saturating_sub(1)).map(|u| (u, u + 1)).collect())
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, u: Node) -> usize {
        self.adjacency[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, u: Node) -> &[Node] {
        &self.adjacency[u]
    }

    pub fn edges(&self) -> &[(Node, Node)] {
        &self.edges
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edge_index(&self, u: Node, v: Node) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// Component label per node, labels assigned in order of smallest member.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    /// Connected with at least one node.
    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.component_count() == 1
    }

    /// Applies `perm` (old id -> new id) to every node.
    pub fn relabel(&self, perm: &[Node]) -> Graph {
        assert_eq!(perm.len(), self.node_count());
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v]));
        Graph::from_edges(self.node_count(), edges).expect("permutation preserves simplicity")
    }
}

/// Maximum likelihood edge density `m / C(n, 2)`.
pub fn mle_edge_probability(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::InvalidInput(format!("edge density needs n >= 2, got {n}")));
    }
    Ok(g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0) / 2.0))
}

/// Random graph models for 1-skeletons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModel {
    ErdosRenyi { n: usize, p: f64 },
    Complete { n: usize },
    CompleteBipartite { a: usize, b: usize },
    /// Stochastic block model. Blocks are contiguous id ranges in order;
    /// only the upper triangle of `probabilities` is read.
    StochasticBlock { block_sizes: Vec<usize>, probabilities: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphModelSpec {
    pub model: GraphModel,
    pub seed: u64,
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")))
    }
}

impl GraphModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            GraphModel::ErdosRenyi { p, .. } => check_probability(*p),
            GraphModel::Complete { .. } | GraphModel::CompleteBipartite { .. } => Ok(()),
            GraphModel::StochasticBlock { block_sizes, probabilities } => {
                let k = block_sizes.len();
                if block_sizes.iter().any(|&s| s == 0) {
                    return Err(Error::InvalidInput("block sizes must be positive".into()));
                }
                if probabilities.len() != k || probabilities.iter().any(|row| row.len() != k) {
                    return Err(Error::InvalidInput(format!(
                        "probability matrix must be {k}x{k}"
                    )));
                }
                for i in 0..k {
                    for j in 0..k {
                        check_probability(probabilities[i][j])?;
                        if probabilities[i][j] != probabilities[j][i] {
                            return Err(Error::InvalidInput(
                                "probability matrix must be symmetric".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Candidate pairs are decided by one Bernoulli draw each, in
    /// lexicographic `(u, v)` order with `u < v`.
    pub fn sample(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        let mut rng = rng_from_seed(seed);
        let graph = match self {
            GraphModel::ErdosRenyi { n, p } => {
                let n = *n;
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.gen_bool(*p) {
                            edges.push((u, v));
                        }
                    }
                }
                Graph::from_sorted_edges(n, edges)
            }
            GraphModel::Complete { n } => Graph::complete(*n),
            GraphModel::CompleteBipartite { a, b } => Graph::complete_bipartite(*a, *b),
            GraphModel::StochasticBlock { block_sizes, probabilities } => {
                let block: Vec<usize> = block_sizes
                    .iter()
                    .enumerate()
                    .flat_map(|(b, &size)| std::iter::repeat(b).take(size))
                    .collect();
                let n = block.len();
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        let (bi, bj) = (block[u].min(block[v]), block[u].max(block[v]));
                        if rng.gen_bool(probabilities[bi][bj]) {
                            edges.push((u, v));
                        }
                    }
                }
                Graph::from_sorted_edges(n, edges)
            }
        };
        Ok(graph)
    }

    /// The edge probability the occurrence approximation should assume, when
    /// the model defines a single one.
    pub fn edge_probability(&self) -> Option<f64> {
        match self {
            GraphModel::ErdosRenyi { p, .. } => Some(*p),
            GraphModel::Complete { .. } => Some(1.0),
            _ => None,
        }
    }
}

pub fn generate(spec: &GraphModelSpec) -> Result<Graph> {
    spec.model.sample(spec.seed)
}

/// Parses the whitespace-separated `u v` edge-list format.
///
/// Lines starting with `#` are comments. A `# n=<count>` header, as written
/// by [`save_edge_list`], fixes the node count so isolated trailing nodes
/// survive a round trip; otherwise `n` is one past the largest id.
pub fn load_edge_list(text: &str) -> Result<Graph> {
    let mut declared_n: Option<usize> = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) =
                comment.split_whitespace().find_map(|tok| tok.strip_prefix("n="))
            {
                declared_n = Some(value.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad node count {value:?}"),
                })?);
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next_id = || -> Result<Node> {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two node ids".into(),
            })?;
            tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("{tok:?} is not a nonnegative integer"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        if fields.next().is_some() {
            return Err(Error::Parse { line: line_no, message: "trailing fields".into() });
        }
        if u == v {
            return Err(Error::SelfLoop { line: line_no, node: u });
        }
        pairs.push((u, v));
    }
    let inferred = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared_n {
        Some(n) if n < inferred => {
            return Err(Error::Validation(format!(
                "header declares n={n} but node {} appears",
                inferred - 1
            )))
        }
        Some(n) => n,
        None => inferred,
    };
    Graph::from_edges(n, pairs)
}

pub fn save_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n={} m={}", g.node_count(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
