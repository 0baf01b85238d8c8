use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Node};

/// A simple cycle in canonical boundary order.
///
/// The first node is the minimum id and the second node is smaller than the
/// last, so two traversals of the same cycle compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Node>", into = "Vec<Node>")]
pub struct Cycle {
    nodes: Vec<Node>,
}

impl Cycle {
    /// Canonicalizes any traversal of a cycle. Requires at least three
    /// distinct nodes; adjacency is checked separately by [`Cycle::is_cycle_of`].
    pub fn new(mut nodes: Vec<Node>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Validation(format!(
                "a cycle needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("repeated node in cycle {nodes:?}")));
        }
        let start = nodes.iter().enumerate().min_by_key(|&(_, v)| *v).map(|(i, _)| i).unwrap();
        nodes.rotate_left(start);
        if nodes[1] > nodes[nodes.len() - 1] {
            nodes[1..].reverse();
        }
        Ok(Cycle { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Consecutive pairs along the canonical traversal, closing pair last.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        let l = self.nodes.len();
        (0..l).map(move |i| (self.nodes[i], self.nodes[(i + 1) % l]))
    }

    pub fn is_cycle_of(&self, g: &Graph) -> bool {
        self.nodes.iter().all(|&v| v < g.node_count())
            && self.edges().all(|(u, v)| g.has_edge(u, v))
    }

    pub fn relabel(&self, perm: &[Node]) -> Cycle {
        Cycle::new(self.nodes.iter().map(|&v| perm[v]).collect())
            .expect("relabeling preserves distinctness")
    }
}

impl TryFrom<Vec<Node>> for Cycle {
    type Error = Error;
    fn try_from(nodes: Vec<Node>) -> Result<Self> {
        let cycle = Cycle::new(nodes.clone())?;
        if cycle.nodes != nodes {
            return Err(Error::Validation(format!("cycle {nodes:?} is not in canonical form")));
        }
        Ok(cycle)
    }
}

impl From<Cycle> for Vec<Node> {
    fn from(c: Cycle) -> Vec<Node> {
        c.nodes
    }
}
