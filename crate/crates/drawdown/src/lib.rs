//! Command line front end for the drawdown solver: JSON run configurations,
//! CSV/JSON artifacts, and parallel Monte Carlo drivers on top of
//! `drawdown-core`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;

pub use error::{CliError, ExitStatus};
