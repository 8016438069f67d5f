//! Multilevel maxent-stress graph layout.
//!
//! Computes 2D straight-line layouts of large undirected graphs by
//! minimizing the maxent-stress objective
//!
//! ```text
//! M(x) = sum_{uv in E} w_uv (|x_u - x_v| - d_uv)^2
//!      - alpha * sum_{uv not in E} ln |x_u - x_v|
//! ```
//!
//! with a local Jacobi-style iteration inside a multilevel scheme: the graph
//! is coarsened by size-constrained label propagation and cluster
//! contraction, the two-node coarsest graph is placed optimally, and each
//! finer level is seeded by randomized prolongation and refined under a
//! geometrically decreasing `alpha`. Long-range repulsion can be
//! approximated through the supervertices of a coarser hierarchy level,
//! trading a little quality for near-linear iterations. Graphs that change
//! over time can be re-laid-out incrementally from their previous
//! coordinates.
//!
//! Iterations read only the previous layout, so coordinates are bitwise
//! reproducible for a fixed seed regardless of thread count.

pub mod cli;
pub mod coarsen;
pub mod dynamic;
pub mod error;
pub mod graph;
pub mod io;
pub mod layout;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod svg;

pub use error::{Error, Result};
pub use graph::{Graph, Layout};
