//! Random gluings of `2n` ideal triangles: sampling, peeling explorations,
//! a disk-gluing model of the compactified hyperbolic metric, and the
//! Monte Carlo studies built on top of them.

pub mod cmap;
pub mod error;
pub mod io;
pub mod metric;
pub mod peel;
pub mod stats;
pub mod unionfind;

pub use error::{Error, Result};
