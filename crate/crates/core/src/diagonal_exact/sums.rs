//! The double series S(i), 𝒮(k) and 𝒮_λ.
//!
//! Every sum here has the shape Σ_j (−2α)^j w_j Σ_m (−2α²)^m /
//! (Γ(m+1+γ̂) Γ(m+1+j)); the inner factor carries 1/Γ(m+1+j), so the outer
//! terms fall off like (2α)^j / j! and plain summation suffices even at
//! α = 1/2.

use std::f64::consts::SQRT_2;

use super::DiagParams;
use crate::specfun::{bessel_j, rgamma, CompensatedSum, Tolerance};
use crate::ExactError;

const OUTER_MAX: usize = 200;
const INNER_MAX: usize = 200;
const EPS: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SSums {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub script_s_lambda: f64,
}

/// (−2α)^j Σ_{m ≥ m0} (−2α²)^m / (Γ(m+1+γ̂) Γ(m+1+j)).
fn column(p: DiagParams, j: usize, m0: usize) -> Result<f64, ExactError> {
    let a = p.alpha();
    let g = p.gamma_hat();
    let x = -2.0 * a * a;
    let jf = j as f64;
    let m0f = m0 as f64;
    let mut term = (-2.0 * a).powi(j as i32)
        * x.powi(m0 as i32)
        * rgamma(m0f + 1.0 + g)
        * rgamma(m0f + 1.0 + jf);
    let mut acc = CompensatedSum::default();
    for m in m0..m0 + INNER_MAX {
        acc.add(term);
        let mf = m as f64;
        if term.abs() <= EPS * acc.value().abs() || term == 0.0 {
            return Ok(acc.value());
        }
        term *= x / ((mf + 1.0 + g) * (mf + 1.0 + jf));
    }
    Err(ExactError::NonConvergence {
        what: "inner m-series",
        terms: INNER_MAX,
    })
}

/// Σ_j (j+1+k) · column(j, m0).
fn outer(p: DiagParams, k: f64, m0: usize) -> Result<f64, ExactError> {
    let mut acc = CompensatedSum::default();
    let mut biggest = 0.0_f64;
    for j in 0..OUTER_MAX {
        let term = (j as f64 + 1.0 + k) * column(p, j, m0)?;
        acc.add(term);
        biggest = biggest.max(term.abs());
        if j >= 2 && term.abs() <= EPS * biggest {
            return Ok(acc.value());
        }
    }
    Err(ExactError::NonConvergence {
        what: "outer j-series",
        terms: OUTER_MAX,
    })
}

/// 𝒮(k) for real k; affine in k.
pub fn script_s(p: DiagParams, k: f64) -> Result<f64, ExactError> {
    outer(p, k, 1)
}

/// 𝒮_λ: the j-weights are j+1+α and the inner sum starts at m = 0.
pub fn script_s_lambda(p: DiagParams) -> Result<f64, ExactError> {
    outer(p, p.alpha(), 0)
}

/// S(0), S(1), S(2) and 𝒮_λ. S(1), S(2) are 𝒮(1), 𝒮(2) plus the Bessel
/// terms that split off when the double sums are reindexed.
pub fn s_sums(p: DiagParams) -> Result<SSums, ExactError> {
    let a = p.alpha();
    let g = p.gamma_hat();
    let z = 2.0 * SQRT_2 * a;
    let tol = Tolerance::default();
    let scale = 0.5 / a.powf(g);
    let b1 = 2f64.powf(0.5 * (1.0 - g)) * scale * bessel_j(1.0 + g, z, tol)?;
    let b2 = 2f64.powf(-0.5 * g) * scale * bessel_j(2.0 + g, z, tol)?;
    Ok(SSums {
        s0: script_s(p, 0.0)?,
        s1: b1 + script_s(p, 1.0)?,
        s2: 2.0 * b1 + b2 + script_s(p, 2.0)?,
        script_s_lambda: script_s_lambda(p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    fn params(l: f64) -> DiagParams {
        DiagParams::new(l).unwrap()
    }

    /// S(i) = Σ_{k≥0} Σ_{m=1}^{k+i} (−2α)^k α^m (k+i+1−m) / (k! Γ(γ̂+1+m)),
    /// summed in the original order.
    fn s_direct(p: DiagParams, i: usize) -> f64 {
        let a = p.alpha();
        let g = p.gamma_hat();
        let mut total = 0.0;
        let mut w = 1.0;
        for k in 0..120usize {
            let mut inner = 0.0;
            for m in 1..=k + i {
                inner += a.powi(m as i32) * (k + i + 1 - m) as f64 / gamma(g + 1.0 + m as f64).unwrap();
            }
            total += w * inner;
            w *= -2.0 * a / (k as f64 + 1.0);
        }
        total
    }

    #[test]
    fn reindexed_sums_match_direct_double_sums() {
        for &l in &[0.0, 1.0, 3.0] {
            let p = params(l);
            let s = s_sums(p).unwrap();
            for (i, v) in [s.s0, s.s1, s.s2].into_iter().enumerate() {
                let d = s_direct(p, i);
                assert!((v - d).abs() < 1e-12, "λ={l} i={i}: {v} vs {d}");
            }
        }
        let s = s_sums(params(1.0)).unwrap();
        assert!((s.s0 + 0.116_052_403_509_471).abs() < 1e-13);
        assert!((s.s1 - 0.039_217_688_821_205_3).abs() < 1e-13);
        assert!((s.s2 - 0.262_366_080_332_74).abs() < 1e-13);
    }

    #[test]
    fn linear_relation() {
        let p = params(0.8);
        let (s0, s1, s2) = (
            script_s(p, 0.0).unwrap(),
            script_s(p, 1.0).unwrap(),
            script_s(p, 2.0).unwrap(),
        );
        for (x, y, z) in [(1.0, 2.0, 3.0), (0.3, -0.7, 2.2), (5.0, 0.0, 1.0)] {
            let lhs = x * s0 + y * s1 + z * s2;
            let rhs = (x + y + z) * script_s(p, (y + 2.0 * z) / (x + y + z)).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn lambda_sum_splits_off_m_zero() {
        for &l in &[0.0, 0.5, 2.0] {
            let p = params(l);
            let a = p.alpha();
            let rhs = script_s(p, a).unwrap() + (1.0 - a) * (-2.0 * a).exp() * rgamma(p.gamma_hat() + 1.0);
            assert!((script_s_lambda(p).unwrap() - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn lambda_zero_bessel_resummation() {
        // at α = 1/2, γ̂ = 0 the inner sums are (√2)^j J_j(√2) and the
        // outer sum telescopes to [J₀(√2) − √2 J₁(√2)] / 2
        let tol = Tolerance::default();
        let j0 = bessel_j(0.0, SQRT_2, tol).unwrap();
        let j1 = bessel_j(1.0, SQRT_2, tol).unwrap();
        let v = script_s_lambda(params(0.0)).unwrap();
        assert!((v - 0.5 * (j0 - SQRT_2 * j1)).abs() < 1e-14);
        assert!((v + 0.105_426_238_662_761_82).abs() < 1e-15);
    }

    #[test]
    fn s2_minus_twice_s1() {
        let p = params(1.0);
        let s = s_sums(p).unwrap();
        let g = p.gamma_hat();
        let a = p.alpha();
        let b2 = 2f64.powf(-0.5 * g) * 0.5 / a.powf(g)
            * bessel_j(2.0 + g, 2.0 * SQRT_2 * a, Tolerance::default()).unwrap();
        let rhs = b2 + script_s(p, 2.0).unwrap() - 2.0 * script_s(p, 1.0).unwrap();
        assert!((s.s2 - 2.0 * s.s1 - rhs).abs() < 1e-10);
    }
}
