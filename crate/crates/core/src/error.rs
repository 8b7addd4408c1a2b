use alloc::boxed::Box;
use alloc::string::String;

use crate::solver::Solution;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("argument out of domain: {0}")]
    Domain(&'static str),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid path configuration: {0}")]
    PathConfig(&'static str),

    #[error("value {value} at node {index} left [0, {bound}]")]
    BoundViolation { index: usize, value: f64, bound: f64 },

    #[error("value iteration stopped after {iterations} sweeps with residual {residual:e}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        partial: Box<Solution>,
    },
}
