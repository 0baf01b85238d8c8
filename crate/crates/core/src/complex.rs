//! Two-dimensional cell complexes: boundary operators, Betti numbers over
//! the rationals, orientability, and the JSON interchange format.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::graph::{Graph, Node};
use crate::linalg;

/// A graph with 2-cells attached along simple cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex2 {
    skeleton: Graph,
    cells: Vec<Cycle>,
}

impl CellComplex2 {
    /// Cells are sorted; duplicates and non-cycles are rejected.
    pub fn new(skeleton: Graph, mut cells: Vec<Cycle>) -> Result<Self> {
        for c in &cells {
            if !c.is_cycle_of(&skeleton) {
                return Err(Error::Validation(format!(
                    "cell {:?} is not a cycle of the skeleton",
                    c.nodes()
                )));
            }
        }
        cells.sort();
        if let Some(w) = cells.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("duplicate cell {:?}", w[0].nodes())));
        }
        Ok(CellComplex2 { skeleton, cells })
    }

    pub fn skeleton(&self) -> &Graph {
        &self.skeleton
    }

    pub fn cells(&self) -> &[Cycle] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Column id of edge `(u, v)` in `B1` / row id in `B2`.
    pub fn edge_index(&self, u: Node, v: Node) -> Option<usize> {
        self.skeleton.edge_index(u, v)
    }
}

/// Sparse column-major signed matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl SignedMatrix {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut dense = vec![vec![0; self.cols()]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                dense[r][c] += v;
            }
        }
        dense
    }

    /// `self * rhs`, column-major.
    pub fn mul(&self, rhs: &SignedMatrix) -> SignedMatrix {
        assert_eq!(self.cols(), rhs.rows);
        let columns = rhs
            .columns
            .iter()
            .map(|rcol| {
                let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                for &(k, b) in rcol {
                    for &(r, a) in &self.columns[k] {
                        *acc.entry(r).or_insert(0) += a * b;
                    }
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        SignedMatrix { rows: self.rows, columns }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|&(_, v)| v == 0))
    }

    /// Rank over the rationals. Small matrices use dense Bareiss
    /// elimination, larger ones sparse column reduction.
    pub fn rank(&self) -> usize {
        if self.rows * self.cols() <= 4096 {
            linalg::rank_bareiss(linalg::to_big(&self.to_dense()))
        } else {
            linalg::rank_sparse(&self.columns)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrices {
    /// `n x m` node-edge incidence: edge `(u, v)`, `u < v`, has -1 at `u`
    /// and +1 at `v`.
    pub b1: SignedMatrix,
    /// `m x k` edge-cell incidence: +1 where the canonical traversal of the
    /// cell runs along the edge orientation, -1 against it.
    pub b2: SignedMatrix,
}

pub fn boundary_matrices(cc: &CellComplex2) -> Result<BoundaryMatrices> {
    let g = &cc.skeleton;
    let b1 = SignedMatrix {
        rows: g.node_count(),
        columns: g.edges().iter().map(|&(u, v)| vec![(u, -1), (v, 1)]).collect(),
    };
    let mut columns = Vec::with_capacity(cc.cells.len());
    for cell in &cc.cells {
        let mut col = Vec::with_capacity(cell.len());
        for (a, b) in cell.edges() {
            let e = g.edge_index(a, b).ok_or_else(|| {
                Error::Validation(format!("cell uses ({a}, {b}), which is not an edge"))
            })?;
            col.push((e, if a < b { 1 } else { -1 }));
        }
        col.sort_unstable();
        columns.push(col);
    }
    let b2 = SignedMatrix { rows: g.edge_count(), columns };
    debug_assert!(b1.mul(&b2).is_zero());
    Ok(BoundaryMatrices { b1, b2 })
}

/// Betti numbers `(b0, b1, b2)` over the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

pub fn cohomology_dims(cc: &CellComplex2) -> Result<Betti> {
    let bm = boundary_matrices(cc)?;
    let g = &cc.skeleton;
    let b0 = g.component_count();
    let rank2 = bm.b2.rank();
    Ok(Betti {
        b0,
        b1: g.edge_count() + b0 - g.node_count() - rank2,
        b2: cc.cells.len() - rank2,
    })
}

/// Orientable when no edge lies on more than two cells and the cells can be
/// oriented so that every edge shared by two cells is traversed in opposite
/// directions.
pub fn is_orientable(cc: &CellComplex2) -> bool {
    let g = &cc.skeleton;
    // edge -> [(cell, direction)]
    let mut incident: Vec<Vec<(usize, i8)>> = vec![Vec::new(); g.edge_count()];
    for (ci, cell) in cc.cells.iter().enumerate() {
        for (a, b) in cell.edges() {
            let Some(e) = g.edge_index(a, b) else {
                return false;
            };
            incident[e].push((ci, if a < b { 1 } else { -1 }));
        }
    }
    let k = cc.cells.len();
    // flip[c] relative to its component root; parity-labelled union-find
    let mut parent: Vec<usize> = (0..k).collect();
    let mut parity = vec![0u8; k];
    fn find(parent: &mut [usize], parity: &mut [u8], x: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut r = x;
        while parent[r] != r {
            path.push(r);
            r = parent[r];
        }
        // compress, accumulating parity toward the root
        for &node in path.iter().rev() {
            let p = parent[node];
            if p != r {
                parity[node] ^= parity[p];
            }
            parent[node] = r;
        }
        (r, parity[x] * (x != r) as u8)
    }
    for cells in &incident {
        match cells.as_slice() {
            [] | [_] => {}
            [(a, da), (b, db)] => {
                // opposite induced directions: flip_a xor flip_b == (da == db)
                let need = (da == db) as u8;
                let (ra, pa) = find(&mut parent, &mut parity, *a);
                let (rb, pb) = find(&mut parent, &mut parity, *b);
                if ra == rb {
                    if pa ^ pb != need {
                        return false;
                    }
                } else {
                    parent[rb] = ra;
                    parity[rb] = pa ^ pb ^ need;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Provenance recorded with a sampled complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMeta {
    pub seed: u64,
    pub s: usize,
    pub mode: serde_json::Value,
    pub approximation: String,
    pub undersampled_lengths: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ComplexDocument {
    n: usize,
    edges: Vec<[Node; 2]>,
    cells: Vec<Cycle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<ComplexMeta>,
}

/// Serializes as `{"n", "edges", "cells", "meta"}` with edges `[u, v]`,
/// `u < v`, ascending and cells in canonical form, sorted.
pub fn complex_to_json(cc: &CellComplex2, meta: Option<&ComplexMeta>) -> String {
    let doc = ComplexDocument {
        n: cc.skeleton.node_count(),
        edges: cc.skeleton.edges().iter().map(|&(u, v)| [u, v]).collect(),
        cells: cc.cells.clone(),
        meta: meta.cloned(),
    };
    let mut out = serde_json::to_string(&doc).expect("complex serializes");
    out.push('\n');
    out
}

pub fn complex_from_json(text: &str) -> Result<(CellComplex2, Option<ComplexMeta>)> {
    let doc: ComplexDocument =
        serde_json::from_str(text).map_err(|e| Error::Validation(e.to_string()))?;
    let skeleton = Graph::from_edges(doc.n, doc.edges.iter().map(|&[u, v]| (u, v)))?;
    if skeleton.edge_count() != doc.edges.len() {
        return Err(Error::Validation("duplicate edges in complex".into()));
    }
    let cc = CellComplex2::new(skeleton, doc.cells)?;
    Ok((cc, doc.meta))
}

/// Summary emitted by the `analyze` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
    pub orientable: bool,
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

pub fn summarize(cc: &CellComplex2) -> Result<ComplexSummary> {
    let betti = cohomology_dims(cc)?;
    Ok(ComplexSummary {
        b0: betti.b0,
        b1: betti.b1,
        b2: betti.b2,
        orientable: is_orientable(cc),
        n: cc.skeleton.node_count(),
        m: cc.skeleton.edge_count(),
        k: cc.cells.len(),
    })
}

/// Cells grouped by boundary length.
pub fn cells_per_length(cc: &CellComplex2) -> BTreeMap<usize, u64> {
    let mut counts = BTreeMap::new();
    for c in &cc.cells {
        *counts.entry(c.len()).or_insert(0) += 1;
    }
    counts
}

pub(crate) fn sorted_set(cells: BTreeSet<Cycle>) -> Vec<Cycle> {
    cells.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(v: &[Node]) -> Cycle {
        Cycle::new(v.to_vec()).unwrap()
    }

    #[test]
    fn triangle_boundaries() {
        let cc = CellComplex2::new(Graph::complete(3), vec![cyc(&[0, 1, 2])]).unwrap();
        let bm = boundary_matrices(&cc).unwrap();
        assert_eq!(bm.b2.to_dense(), vec![vec![1], vec![-1], vec![1]]);
        assert!(bm.b1.mul(&bm.b2).is_zero());
        let empty = CellComplex2::new(Graph::complete(3), vec![]).unwrap();
        assert_eq!(boundary_matrices(&empty).unwrap().b2.cols(), 0);
    }

    #[test]
    fn square_column_signs() {
        let cc = CellComplex2::new(Graph::cycle(4), vec![cyc(&[0, 1, 2, 3])]).unwrap();
        let bm = boundary_matrices(&cc).unwrap();
        // edges (0,1) (0,3) (1,2) (2,3); traversal 0->1->2->3->0
        assert_eq!(bm.b2.columns[0], vec![(0, 1), (1, -1), (2, 1), (3, 1)]);
    }

    #[test]
    fn betti_numbers() {
        let bare = CellComplex2::new(Graph::complete(3), vec![]).unwrap();
        assert_eq!(cohomology_dims(&bare).unwrap(), Betti { b0: 1, b1: 1, b2: 0 });
        let filled = CellComplex2::new(Graph::complete(3), vec![cyc(&[0, 1, 2])]).unwrap();
        assert_eq!(cohomology_dims(&filled).unwrap(), Betti { b0: 1, b1: 0, b2: 0 });
        let square = CellComplex2::new(Graph::cycle(4), vec![cyc(&[0, 1, 2, 3])]).unwrap();
        assert_eq!(cohomology_dims(&square).unwrap(), Betti { b0: 1, b1: 0, b2: 0 });
        // boundary of the tetrahedron encloses a void
        let k4 = Graph::complete(4);
        let faces = vec![cyc(&[0, 1, 2]), cyc(&[0, 1, 3]), cyc(&[0, 2, 3]), cyc(&[1, 2, 3])];
        let sphere = CellComplex2::new(k4, faces).unwrap();
        assert_eq!(cohomology_dims(&sphere).unwrap(), Betti { b0: 1, b1: 0, b2: 1 });
        assert!(is_orientable(&sphere));
    }

    #[test]
    fn orientability_cases() {
        let k3 = CellComplex2::new(Graph::complete(3), vec![cyc(&[0, 1, 2])]).unwrap();
        assert!(is_orientable(&k3));
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)]).unwrap();
        let two = CellComplex2::new(g, vec![cyc(&[0, 1, 2]), cyc(&[1, 2, 3])]).unwrap();
        assert!(is_orientable(&two));
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (1, 4), (2, 4)]).unwrap();
        let three =
            CellComplex2::new(g, vec![cyc(&[0, 1, 2]), cyc(&[1, 2, 3]), cyc(&[1, 2, 4])]).unwrap();
        assert!(!is_orientable(&three));
    }

    #[test]
    fn mobius_strip_is_not_orientable() {
        // a band of four squares glued with a half twist
        let g = Graph::from_edges(
            8,
            [
                (0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7),
                (0, 4), (1, 5), (2, 6), (3, 7), (3, 4), (7, 0),
            ],
        )
        .unwrap();
        let squares = vec![
            cyc(&[0, 1, 5, 4]),
            cyc(&[1, 2, 6, 5]),
            cyc(&[2, 3, 7, 6]),
            cyc(&[3, 4, 0, 7]),
        ];
        let band = CellComplex2::new(g.clone(), squares.clone()).unwrap();
        assert!(!is_orientable(&band));
        // the untwisted annulus glues 3-7 to 0-4 instead of 3-4 / 7-0
        let annulus_g = Graph::from_edges(
            8,
            [
                (0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7),
                (0, 4), (1, 5), (2, 6), (3, 7), (3, 0), (7, 4),
            ],
        )
        .unwrap();
        let annulus = CellComplex2::new(
            annulus_g,
            vec![cyc(&[0, 1, 5, 4]), cyc(&[1, 2, 6, 5]), cyc(&[2, 3, 7, 6]), cyc(&[3, 0, 4, 7])],
        )
        .unwrap();
        assert!(is_orientable(&annulus));
    }

    #[test]
    fn rejects_duplicates_and_non_cycles() {
        assert!(CellComplex2::new(Graph::complete(3), vec![cyc(&[0, 1, 2]), cyc(&[2, 1, 0])]).is_err());
        assert!(CellComplex2::new(Graph::path(3), vec![cyc(&[0, 1, 2])]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let cc = CellComplex2::new(Graph::complete(4), vec![cyc(&[0, 1, 2]), cyc(&[0, 1, 2, 3])]).unwrap();
        let meta = ComplexMeta {
            seed: 5,
            s: 10,
            mode: serde_json::json!({"uniform_probability": {"3": 0.5}}),
            approximation: "fast".into(),
            undersampled_lengths: vec![],
        };
        let text = complex_to_json(&cc, Some(&meta));
        assert!(text.starts_with(r#"{"n":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],"cells":[[0,1,2],[0,1,2,3]],"meta":"#));
        let (back, back_meta) = complex_from_json(&text).unwrap();
        assert_eq!(back, cc);
        assert_eq!(back_meta.as_ref(), Some(&meta));
        assert_eq!(complex_to_json(&back, back_meta.as_ref()), text);
        assert!(complex_from_json(r#"{"n":3,"edges":[[0,1]],"cells":[[0,1,2]]}"#).is_err());
    }
}
