//! Random two-dimensional abstract cell complexes.
//!
//! A graph is lifted to a cell complex by attaching 2-cells along simple
//! cycles. Cycles are drawn from the fundamental cycles of uniform spanning
//! trees and reweighted by their occurrence probability, so that each cycle
//! of length `l` ends up in the complex with a chosen probability `P_l`.
//!
//! ```
//! use rcc::graph::Graph;
//! use rcc::lifting::{sample_lifting, SamplingConfig, SamplingMode};
//! use rcc::occurrence::Approximation;
//!
//! let g = Graph::complete(3);
//! let mode = SamplingMode::UniformProbability([(3, 1.0)].into());
//! let cfg = SamplingConfig::new(1, mode, Approximation::Fast, 0);
//! let (complex, _report) = sample_lifting(&g, &cfg).unwrap();
//! assert_eq!(complex.cell_count(), 1);
//! ```

pub mod census;
pub mod complex;
pub mod cycle;
pub mod error;
pub mod exec;
pub mod graph;
pub mod lifting;
pub mod linalg;
pub mod occurrence;
#[cfg(feature = "oracles")]
pub mod oracles;
mod scan;
pub mod seed;
pub mod tree;
pub mod wide;

pub use error::{Error, Result};
