//! Per-tree pass over non-tree edges shared by the census and the sampler.

use crate::cycle::Cycle;
use crate::error::Result;
use crate::graph::Graph;
use crate::wide::WideFloat;
use crate::occurrence::{
    clamp_probability_wide, rho_approx_from_path, rho_estimated_wide, Approximation, OccurrenceParams,
};
use crate::tree::{induced_cycle_with_lca, path_components, NonTreeEdge, RootedSpanningTree};

pub(crate) struct Occurrence {
    pub length: usize,
    pub rho: WideFloat,
    pub clamped: bool,
    /// Materialized cycle when the approximation needed it.
    pub cycle: Option<Cycle>,
}

pub(crate) fn occurrence(
    g: &Graph,
    tree: &RootedSpanningTree,
    edge: &NonTreeEdge,
    params: OccurrenceParams,
    approximation: Approximation,
) -> Result<Occurrence> {
    let (length, raw, cycle) = match approximation {
        Approximation::Fast => {
            let pc = path_components(tree, edge.u, edge.v, edge.lca);
            (pc.length, rho_approx_from_path(&pc, params)?, None)
        }
        Approximation::Estimated => {
            let c = induced_cycle_with_lca(tree, edge.u, edge.v, edge.lca)?;
            let raw = rho_estimated_wide(&c, g, params)?;
            (c.len(), raw, Some(c))
        }
    };
    let (rho, clamped) = clamp_probability_wide(raw);
    Ok(Occurrence { length, rho, clamped, cycle })
}
