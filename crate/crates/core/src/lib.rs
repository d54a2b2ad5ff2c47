//! Temporal random geometric graphs on the unit torus.
//!
//! - [`model`]: torus metric, uniform points, connection kernels.
//! - [`generator`]: graph generation with counter-based per-pair randomness.
//! - [`temporal`]: temporal reachability, connectivity, longest increasing paths.
//! - [`percolation`]: box grid, dual lattice and directed percolation coupling (d = 2).
//! - [`bounds`]: numeric evaluation of first-moment and concentration bounds.
//! - [`experiments`]: Monte Carlo sweeps, threshold fits, CSV and SVG output.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod fmt;
pub mod generator;
pub mod io;
pub mod model;
pub mod percolation;
mod quad;
pub mod rng;
pub mod stats;
pub mod temporal;
pub mod unionfind;

pub use error::{Error, Result};
pub use generator::{generate_graph, TemporalEdge, TemporalGraph, TemporalNetwork};
pub use model::{Kernel, PointSet, TorusPoint};
pub use rng::CounterRng;
