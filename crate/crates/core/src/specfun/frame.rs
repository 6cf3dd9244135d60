//! Bessel functions reparametrized by a shift/scale frame, and the bilinear
//! combinations Υ and Δ that solve the front-process recursions.

use std::f64::consts::PI;

use super::bessel::{bessel_j_any, bessel_y};
use super::gamma::ln_gamma;
use super::{SpecialFunctionError, Tolerance};

/// The pair (A, B) defining Ĵ_n = J_{n+A/B}(2/B) and Ŷ_n = Y_{n+A/B}(2/B).
///
/// Both Ĵ and Ŷ satisfy Ĉ_{n+1} + Ĉ_{n−1} = (A + Bn) Ĉ_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselFrame {
    a: f64,
    b: f64,
}

impl BesselFrame {
    pub fn new(a: f64, b: f64) -> Result<Self, SpecialFunctionError> {
        if !a.is_finite() || !b.is_finite() || b <= 0.0 {
            return Err(SpecialFunctionError::InvalidArgument {
                function: "BesselFrame",
                detail: format!("need finite A and B > 0, got A={a}, B={b}"),
            });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Order of Ĵ_n / Ŷ_n.
    pub fn order(&self, n: i64) -> f64 {
        n as f64 + self.a / self.b
    }

    /// Common argument 2/B.
    pub fn argument(&self) -> f64 {
        2.0 / self.b
    }

    pub fn j_hat(&self, n: i64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
        bessel_j_any(self.order(n), self.argument(), tol)
    }

    pub fn y_hat(&self, n: i64, tol: Tolerance) -> Result<f64, SpecialFunctionError> {
        bessel_y(self.order(n), self.argument(), tol)
    }
}

/// Υ(n, m, A, B) = π[Ĵ_n Ŷ_m − Ĵ_m Ŷ_n].
pub fn upsilon(n: i64, m: i64, frame: &BesselFrame) -> Result<f64, SpecialFunctionError> {
    let tol = Tolerance::default();
    let jn = frame.j_hat(n, tol)?;
    let jm = frame.j_hat(m, tol)?;
    let yn = frame.y_hat(n, tol)?;
    let ym = frame.y_hat(m, tol)?;
    Ok(PI * (jn * ym - jm * yn))
}

/// Δ(n, m, A, B) = Υ_n − Υ_{n−1}.
pub fn delta(n: i64, m: i64, frame: &BesselFrame) -> Result<f64, SpecialFunctionError> {
    if n < 1 {
        return Err(SpecialFunctionError::InvalidArgument {
            function: "delta",
            detail: format!("n must be >= 1, got {n}"),
        });
    }
    Ok(upsilon(n, m, frame)? - upsilon(n - 1, m, frame)?)
}

/// Υ(n, m) divided by its large-n asymptote Ĵ_m Γ(n + A/B) B^{n + A/B}.
///
/// The asymptote is assembled in log space because Γ(n + A/B) B^n leaves
/// the f64 range quickly.
pub fn upsilon_asymptotic_ratio(
    n: i64,
    m: i64,
    frame: &BesselFrame,
) -> Result<f64, SpecialFunctionError> {
    let ups = upsilon(n, m, frame)?;
    let jm = frame.j_hat(m, Tolerance::default())?;
    let order = frame.order(n);
    let log_scale = ln_gamma(order)? + order * frame.b().ln();
    if log_scale.abs() > 300.0 {
        let log_ratio = ups.abs().ln() - jm.abs().ln() - log_scale;
        Ok((ups * jm).signum() * log_ratio.exp())
    } else {
        Ok(ups / (jm * log_scale.exp()))
    }
}
