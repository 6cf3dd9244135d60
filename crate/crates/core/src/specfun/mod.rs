//! Real-argument special functions: Gamma, fractional-order Bessel J and Y,
//! and the Υ/Δ combinations built from them.
//!
//! Everything here is a pure function of its inputs.

mod bessel;
mod dd;
mod frame;
mod gamma;

use thiserror::Error;

pub use bessel::{bessel_j, bessel_y, wronskian_residual};
pub(crate) use bessel::CompensatedSum;
pub use frame::{delta, upsilon, upsilon_asymptotic_ratio, BesselFrame};
pub use gamma::{
    cos_pi, factorial_falling, factorial_rising, gamma, ln_gamma, ln_gamma_signed, rgamma, sin_pi,
    GAMMA_MAX_ARG,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFunctionError {
    #[error("{function}: pole at x = {x}")]
    Pole { function: &'static str, x: f64 },
    #[error("{function}: result overflows f64 at x = {x}")]
    Overflow { function: &'static str, x: f64 },
    #[error("{function}: invalid argument: {detail}")]
    InvalidArgument {
        function: &'static str,
        detail: String,
    },
    #[error(
        "{function}: series did not converge in {terms} terms \
         (partial sum {partial_sum:e}, last term {last_term:e})"
    )]
    NonConvergence {
        function: &'static str,
        terms: usize,
        partial_sum: f64,
        last_term: f64,
    },
}

/// Series truncation control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Stop once the next term is below `rel_eps` times the running sum.
    pub rel_eps: f64,
    pub max_terms: usize,
}

impl Tolerance {
    pub fn new(rel_eps: f64, max_terms: usize) -> Result<Self, SpecialFunctionError> {
        if !(rel_eps > 0.0 && rel_eps < 1.0) || max_terms < 16 {
            return Err(SpecialFunctionError::InvalidArgument {
                function: "Tolerance",
                detail: format!(
                    "rel_eps must lie in (0, 1) and max_terms >= 16 (got {rel_eps}, {max_terms})"
                ),
            });
        }
        Ok(Self { rel_eps, max_terms })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_eps: 1e-17,
            max_terms: 500,
        }
    }
}
