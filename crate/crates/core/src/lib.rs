//! Optimal proportional reinsurance for keeping a diffusion surplus out of a
//! critical drawdown region when the drawdown is only inspected at renewal
//! times.
//!
//! The crate is `no_std` (with `alloc`). It contains the model, the closed
//! form drawdown law under a constant retention, the Poisson observation
//! kernel, the value iteration solver and a path simulator used to check all
//! of the above. File formats, the command line and parallel drivers live in
//! the `drawdown` crate.

#![no_std]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dist;
pub mod grid;
pub mod kernel;
pub mod laplace;
pub mod model;
pub mod normal;
pub mod sim;
pub mod solver;
pub mod stats;

mod error;

pub use dist::DrawdownLaw;
pub use error::{Error, Result};
pub use grid::{build_grid, GridSpec, Layout, SolveGrid};
pub use kernel::PoissonKernel;
pub use model::{ModelParams, ObservationScheme, Retention};
pub use sim::{PathConfig, PathOutcome, PolicyEstimate, Sampler};
pub use solver::{bellman_apply, solve, Bellman, FeedbackPolicy, Solution};
