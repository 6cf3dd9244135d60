//! Speeds of first-passage percolation fronts on ladder-like graphs.
//!
//! Two graphs have exact answers: the ladder ℤ×{0,1} with vertical edges of
//! rate λ and horizontal edges of rate 1, and the same ladder with both
//! diagonals added. For both, the gap between the two infected rows is a
//! birth-and-catastrophe chain and the front speed is an affine function of
//! its stationary probability at zero.
//!
//! * [`specfun`]: Gamma and fractional-order Bessel functions.
//! * [`front_chain`]: truncated generators and a dense stationary solver.
//! * [`ladder_exact`]: closed form for the ladder via Bessel functions.
//! * [`diagonal_exact`]: closed form for the diagonal ladder via a
//!   generating-function limit.
//! * [`fpp_sim`]: Gillespie simulation on any ladder-like graph.
//! * [`cli`]: the `ladder-fpp` command line.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub mod cli;
pub mod diagonal_exact;
pub mod fpp_sim;
pub mod front_chain;
pub mod ladder_exact;
pub mod specfun;

use front_chain::ChainError;
use specfun::SpecialFunctionError;

/// How a speed was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactBessel,
    ExactGf,
    ChainSolve,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExactBessel => "exact-bessel",
            Method::ExactGf => "exact-gf",
            Method::ChainSolve => "chain-solve",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedResult {
    pub speed: f64,
    /// Stationary probability that both rows are level, when known.
    pub pi0: Option<f64>,
    pub method: Method,
    /// Deterministic bound on |speed − true speed| (chain solves).
    pub error_bound: Option<f64>,
    /// 95% interval (simulations).
    pub confidence_interval: Option<(f64, f64)>,
}

/// Errors from the closed-form evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("{name} = {value} is outside [{min}, {max}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{what} did not converge after {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
    #[error(transparent)]
    SpecialFunction(#[from] SpecialFunctionError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    min: f64,
    max: f64,
) -> Result<f64, ExactError> {
    if value.is_finite() && value >= min && value <= max {
        Ok(value)
    } else {
        Err(ExactError::ParameterOutOfRange {
            name,
            value,
            min,
            max,
        })
    }
}
