//! Real-order Bessel functions of the first and second kind, by ascending
//! power series.
//!
//! All call sites in this crate have moderate arguments (z = 2/λ with
//! λ ≥ 0.04, or z = 2√2α ≤ √2), so the power series is enough once its
//! terms are carried in extended precision.

use std::f64::consts::PI;

use super::dd::Dd;
use super::gamma::{cos_pi, gamma, ln_gamma_signed, sin_pi, GAMMA_MAX_ARG};
use super::{SpecialFunctionError, Tolerance};

/// Orders closer than this to an integer go through the integer branch of Y.
const NEAR_INTEGER: f64 = 1e-6;

/// Offset used by the integer branch of Y (2^-17).
const Y_STEP: f64 = 7.62939453125e-6;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn is_integer(x: f64) -> bool {
    x == x.floor()
}

/// (z/2)^ν / Γ(ν + 1), directly when both factors are in range and in log
/// space otherwise.
fn leading_term(nu: f64, half: f64) -> Result<f64, SpecialFunctionError> {
    if nu + 1.0 < GAMMA_MAX_ARG {
        if let Ok(g) = gamma(nu + 1.0) {
            let p = half.powf(nu);
            if p.is_normal() && g.is_normal() {
                return Ok(p / g);
            }
        }
    }
    let (lg, sign) = ln_gamma_signed(nu + 1.0)?;
    let log_t0 = nu * half.ln() - lg;
    if log_t0 > 709.0 {
        return Err(SpecialFunctionError::Overflow {
            function: "bessel_j",
            x: nu,
        });
    }
    Ok(sign * log_t0.exp())
}

/// Ascending series for J_ν(z), any real ν that is not a negative integer.
///
/// Terms are carried in double-double: for ν ≈ z ≈ 50 the alternating sum
/// is about 1e11 times smaller than its largest term.
fn j_series(nu: f64, z: f64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
    debug_assert!(z > 0.0);
    let half = 0.5 * z;
    let neg_q = -Dd::prod(half, half);
    let t0 = leading_term(nu, half)?;
    if t0 == 0.0 && nu >= 0.0 {
        // every later term is smaller than the first; the sum underflows
        return Ok(0.0);
    }
    let mut term = Dd::new(t0);
    let mut acc = term;
    for k in 0..tol.max_terms {
        let kf = k as f64;
        let shifted = Dd::sum(nu, kf + 1.0);
        let denom = shifted.scale(kf + 1.0);
        term = term * neg_q / denom;
        acc = acc + term;
        // terms decrease monotonically once the ratio is below one and the
        // Gamma argument is positive
        let settled = shifted.hi > 0.0 && denom.hi > -neg_q.hi;
        if settled && term.hi.abs() <= tol.rel_eps * acc.hi.abs() {
            return Ok(acc.to_f64());
        }
        if settled && acc.hi == 0.0 && term.hi == 0.0 {
            return Ok(0.0);
        }
    }
    Err(SpecialFunctionError::NonConvergence {
        function: "bessel_j",
        terms: tol.max_terms,
        partial_sum: acc.to_f64(),
        last_term: term.to_f64(),
    })
}

/// J_ν(z) for any real order (negative integers via J_{-n} = (-1)^n J_n).
pub(crate) fn bessel_j_any(nu: f64, z: f64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
    if z == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if nu < 0.0 && is_integer(nu) {
        let n = -nu;
        let j = j_series(n, z, tol)?;
        return Ok(if (n as i64) % 2 == 0 { j } else { -j });
    }
    j_series(nu, z, tol)
}

fn check_argument(function: &'static str, nu: f64, z: f64) -> Result<(), SpecialFunctionError> {
    if !nu.is_finite() || !z.is_finite() {
        return Err(SpecialFunctionError::InvalidArgument {
            function,
            detail: format!("non-finite input (nu={nu}, z={z})"),
        });
    }
    Ok(())
}

/// Bessel function of the first kind J_ν(z) for ν ≥ 0, z ≥ 0.
pub fn bessel_j(nu: f64, z: f64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
    check_argument("bessel_j", nu, z)?;
    if nu < 0.0 || z < 0.0 {
        return Err(SpecialFunctionError::InvalidArgument {
            function: "bessel_j",
            detail: format!("requires nu >= 0 and z >= 0 (nu={nu}, z={z})"),
        });
    }
    bessel_j_any(nu, z, tol)
}

fn y_non_integer(nu: f64, z: f64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
    let jp = bessel_j_any(nu, z, tol)?;
    let jm = bessel_j_any(-nu, z, tol)?;
    Ok((jp * cos_pi(nu) - jm) / sin_pi(nu))
}

/// Bessel function of the second kind Y_ν(z), z > 0, any real order.
///
/// Off the integers this is (J_ν cos νπ − J_{−ν}) / sin νπ. Within 1e-6 of
/// an integer the same formula is averaged symmetrically about ν at offsets
/// h and 2h and combined by one Richardson step, which removes the O(h²)
/// bias of the plain average.
pub fn bessel_y(nu: f64, z: f64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
    check_argument("bessel_y", nu, z)?;
    if !(z > 0.0) {
        return Err(SpecialFunctionError::InvalidArgument {
            function: "bessel_y",
            detail: format!("requires z > 0, got {z}"),
        });
    }
    if (nu - nu.round()).abs() >= NEAR_INTEGER {
        return y_non_integer(nu, z, tol);
    }
    let avg = |h: f64| -> Result<f64, SpecialFunctionError> {
        Ok(0.5 * (y_non_integer(nu + h, z, tol)? + y_non_integer(nu - h, z, tol)?))
    };
    let a1 = avg(Y_STEP)?;
    let a2 = avg(2.0 * Y_STEP)?;
    let y = (4.0 * a1 - a2) / 3.0;
    if !y.is_finite() {
        return Err(SpecialFunctionError::NonConvergence {
            function: "bessel_y",
            terms: tol.max_terms,
            partial_sum: y,
            last_term: a2 - a1,
        });
    }
    Ok(y)
}

/// π[J_{ν+1}(z)Y_ν(z) − J_ν(z)Y_{ν+1}(z)] − 2/z, for diagnostics and tests.
pub fn wronskian_residual(nu: f64, z: f64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
    let j0 = bessel_j_any(nu, z, tol)?;
    let j1 = bessel_j_any(nu + 1.0, z, tol)?;
    let y0 = bessel_y(nu, z, tol)?;
    let y1 = bessel_y(nu + 1.0, z, tol)?;
    Ok(PI * (j1 * y0 - j0 * y1) - 2.0 / z)
}
