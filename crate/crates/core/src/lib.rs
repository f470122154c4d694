//! Random pebbling configurations on graphs.
//!
//! - [`graph`]: immutable connected graphs and the fuse family `F(m, n)`.
//! - [`sampling`]: configurations, the dependent (uniform multiset) and
//!   independent placement models, exact configuration counts.
//! - [`solvers`]: exhaustive search, linear-time tree solvers, and the fuse
//!   weight certificate.
//! - [`analytics`]: the occupancy law and the expectation and tail bounds
//!   built on it.
//! - [`family`] and [`experiments`]: Monte Carlo threshold location and
//!   exponent fits over graph families.
//! - [`cli`]: the `pebble` command-line front end.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod family;
pub mod graph;
pub mod sampling;
pub mod solvers;

pub use error::{PebbleError, Result};
pub use graph::{build_fuse, build_path, build_star, FuseSpec, Graph, GraphKind};
pub use sampling::{Configuration, SeedPolicy};
