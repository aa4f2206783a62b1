//! Numerical core for community detection in multi-layer stochastic block
//! models via bias-adjusted sum-of-squared spectral clustering.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs: sampling is driven by explicit 64-bit seeds, and no
//! module touches the filesystem or global state. The companion `mlsbm` crate
//! layers configuration files, CSV/SVG output and the command line on top.
//!
//! Module map:
//!
//! * [`linalg`]: dense matrices, the symmetric eigensolver, operator norms,
//!   dilations and subspace distances.
//! * [`sbm`]: model specification, seeded sampling, population quantities and
//!   the least-squares oracle.
//! * [`aggregate`]: the layer aggregation strategies (sum, sum of squares,
//!   bias-adjusted sum of squares, matricization) and noise diagnostics.
//! * [`cluster`]: spectral embedding, k-means, the misclustering metric and the
//!   end-to-end estimator.
//! * [`concentration`]: σ-profiles, Bernstein parameters, quadratic-form
//!   splits, bound evaluation and Monte-Carlo operator-norm studies.
//! * [`pipeline`]: correlation thresholding, degree filtering and network
//!   diagnostics for expression data.
#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod aggregate;
pub mod cluster;
pub mod concentration;
mod error;
pub mod linalg;
pub(crate) mod math;
pub mod pipeline;
pub mod rng;
pub mod sbm;

pub use error::{Error, Result};
