//! Exact front speed on the ladder with both diagonals, vertical intensity λ
//! and all other intensities 1.
//!
//! The balance equations give π_n = c_n π₀ − d_n with polynomial c_n, d_n.
//! Their generating functions solve a first-order ODE whose coefficient
//! asymptotics give π₀ = lim d_n/c_n as a ratio of two weighted sums of the
//! limits L₀, L₁, L₂; those reduce to Bessel terms plus a fast double
//! series 𝒮_λ. The front advances at rate 4 from the level state and 2
//! otherwise, so the speed is 2(1 + π₀).

mod asymptotics;
mod integrals;
mod sums;

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

use crate::front_chain::diagonal_generator;
use crate::ladder_exact::{affine_recursion, AffineSeq};
use crate::specfun::{bessel_j, gamma, Tolerance};
use crate::{check_range, ExactError, Method, SpeedResult};

pub use asymptotics::{fhat_ratio, script_a_ratio};
pub use integrals::{ij_integrals, ij_integrals_beta, l_limits, l_limits_direct};
pub use sums::{s_sums, script_s, script_s_lambda, SSums};

pub const LAMBDA_MIN: f64 = 0.0;
pub const LAMBDA_MAX: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagParams {
    lambda: f64,
}

impl DiagParams {
    pub fn new(lambda: f64) -> Result<Self, ExactError> {
        check_range("lambda", lambda, LAMBDA_MIN, LAMBDA_MAX).map(|lambda| Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// α = 1/(2+λ) ∈ (0, 1/2].
    pub fn alpha(&self) -> f64 {
        1.0 / (2.0 + self.lambda)
    }

    /// γ̂ = −λ/(2+λ) ∈ (−1, 0].
    pub fn gamma_hat(&self) -> f64 {
        -self.lambda / (2.0 + self.lambda)
    }
}

/// Coefficients of the generating-function ODE and the weights that turn
/// L₀, L₁, L₂ into the asymptotics of c_n (R̂) and d_n (R*).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFParams {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub gamma: f64,
    pub c: f64,
    pub d: f64,
    pub r_hat: [f64; 3],
    pub r_star: [f64; 3],
}

impl GFParams {
    pub fn new(p: DiagParams) -> Self {
        let l = p.lambda;
        let s = 2.0 + l;
        let alpha = 1.0 / s;
        let beta1 = (7.0 + 2.0 * l) / s;
        let beta2 = -(6.0 + l) / (s * s);
        let beta3 = 2.0 / (s * s * s);
        // R_0 = a_0, R_1 = a_1 − β₁a_0, R_2 = a_2 − (1+β₁)a_1 − β₂a_0 on the
        // rescaled leading triples a_n = x_{n+1}(2+λ)^{−n}
        let weights = |t: [f64; 3]| {
            let a = [t[0], t[1] / s, t[2] / (s * s)];
            [
                a[0],
                a[1] - beta1 * a[0],
                a[2] - (1.0 + beta1) * a[1] - beta2 * a[0],
            ]
        };
        let (c3, d3) = leading_triples(l);
        Self {
            alpha,
            beta1,
            beta2,
            beta3,
            gamma: alpha - beta1,
            c: 2.0 * alpha * alpha,
            d: 1.0,
            r_hat: weights(c3),
            r_star: weights(d3),
        }
    }
}

/// (c₁, c₂, c₃) and (d₁, d₂, d₃).
fn leading_triples(l: f64) -> ([f64; 3], [f64; 3]) {
    let l2 = l * l;
    let l3 = l2 * l;
    (
        [5.0 + l, 28.0 + 17.0 * l + 2.0 * l2, 226.0 + 226.0 * l + 68.0 * l2 + 6.0 * l3],
        [1.0 + l, 8.0 + 9.0 * l + 2.0 * l2, 66.0 + 98.0 * l + 44.0 * l2 + 6.0 * l3],
    )
}

/// Top-left `size`×`size` corner of the diagonal-ladder front generator.
pub fn build_q_diagonal(p: DiagParams, size: usize) -> Result<DMatrix<f64>, ExactError> {
    if size < 5 {
        return Err(ExactError::ParameterOutOfRange {
            name: "size",
            value: size as f64,
            min: 5.0,
            max: f64::INFINITY,
        });
    }
    Ok(diagonal_generator(p.lambda, size))
}

/// π_n = c_n π₀ − d_n, scaled like [`AffineSeq`].
#[derive(Debug, Clone, PartialEq)]
pub struct CDSeq(AffineSeq);

impl CDSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn c(&self, n: usize) -> f64 {
        self.0.a(n)
    }

    pub fn d(&self, n: usize) -> f64 {
        self.0.b(n)
    }

    /// d_n / c_n, which tends to π₀.
    pub fn ratio(&self, n: usize) -> f64 {
        self.0.ratio(n)
    }
}

pub fn cd_sequences(p: DiagParams, n_max: usize) -> Result<CDSeq, ExactError> {
    if n_max < 3 {
        return Err(ExactError::ParameterOutOfRange {
            name: "n_max",
            value: n_max as f64,
            min: 3.0,
            max: f64::INFINITY,
        });
    }
    let l = p.lambda;
    let (c, d) = leading_triples(l);
    affine_recursion(
        [1.0, c[0], c[1], c[2]],
        [0.0, d[0], d[1], d[2]],
        n_max,
        |n| ((2.0 + l) * n + 3.0, (2.0 + l) * (n - 2.0) + 4.0, 2.0),
    )
    .map(CDSeq)
}

/// π₀ from the limiting fraction with its Bessel terms at 2√2α.
pub fn pi0_diagonal(p: DiagParams) -> Result<f64, ExactError> {
    let a = p.alpha();
    let g = p.gamma_hat();
    let z = 2.0 * SQRT_2 * a;
    let tol = Tolerance::default();
    let j1 = bessel_j(1.0 + g, z, tol)?;
    let j2 = bessel_j(2.0 + g, z, tol)?;
    let common = (2.0 * a - 1.0) * (-2.0 * a).exp() / gamma(g + 1.0)? + script_s_lambda(p)?;
    let pref = 0.5 * (SQRT_2 * a).powf(1.0 - g);
    Ok((common + pref * j1) / (common + pref * (j1 + 2.0 * SQRT_2 * j2)))
}

/// π₀ as Σ R*_i L_i / Σ R̂_i L_i, straight from the three limits.
pub fn pi0_from_limits(p: DiagParams) -> Result<f64, ExactError> {
    let gf = GFParams::new(p);
    let l = l_limits(p)?;
    let dot = |r: [f64; 3]| r[0] * l[0] + r[1] * l[1] + r[2] * l[2];
    Ok(dot(gf.r_star) / dot(gf.r_hat))
}

/// The λ = 0 fraction (J₀ − J₁/√2)/(−J₀ + 3J₁/√2) at √2.
pub fn pi0_lambda_zero() -> Result<f64, ExactError> {
    let (j0, j1) = bessel_at_sqrt2()?;
    Ok((j0 - j1 / SQRT_2) / (-j0 + 3.0 * j1 / SQRT_2))
}

/// Time constant 1/speed at λ = 0: 3/4 − J₀(√2)/(2√2 J₁(√2)).
pub fn time_constant_lambda_zero() -> Result<f64, ExactError> {
    let (j0, j1) = bessel_at_sqrt2()?;
    Ok(0.75 - j0 / (2.0 * SQRT_2 * j1))
}

fn bessel_at_sqrt2() -> Result<(f64, f64), ExactError> {
    let tol = Tolerance::default();
    Ok((bessel_j(0.0, SQRT_2, tol)?, bessel_j(1.0, SQRT_2, tol)?))
}

pub fn speed_diagonal(p: DiagParams) -> Result<SpeedResult, ExactError> {
    let pi0 = pi0_diagonal(p)?;
    Ok(SpeedResult {
        speed: 2.0 * (1.0 + pi0),
        pi0: Some(pi0),
        method: Method::ExactGf,
        error_bound: None,
        confidence_interval: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front_chain::{solve_stationary, FrontChain};

    fn params(l: f64) -> DiagParams {
        DiagParams::new(l).unwrap()
    }

    #[test]
    fn regime() {
        assert!(DiagParams::new(-0.1).is_err());
        assert!(DiagParams::new(1e4).is_err());
        let p = params(0.0);
        assert_eq!(p.alpha(), 0.5);
        assert_eq!(p.gamma_hat(), 0.0);
    }

    #[test]
    fn q_rows() {
        let q = build_q_diagonal(params(0.0), 6).unwrap();
        let r2: Vec<f64> = q.row(2).iter().copied().collect();
        assert_eq!(r2, [1.0, 3.0, -6.0, 2.0, 0.0, 0.0]);
        assert!(build_q_diagonal(params(0.0), 4).is_err());
    }

    #[test]
    fn gf_weights() {
        for &l in &[0.0, 0.5, 1.0, 7.0] {
            let p = params(l);
            let gf = GFParams::new(p);
            let a = p.alpha();
            let close = |x: f64, y: f64| (x - y).abs() < 1e-13 * y.abs().max(1.0);
            assert!(close(gf.r_hat[0], 5.0 + l));
            assert!(close(gf.r_hat[1], -7.0 * a));
            assert!(close(gf.r_hat[2], 4.0 * a * a));
            assert!(close(gf.r_star[0], 1.0 + l));
            assert!(close(gf.r_star[1], a));
            assert!(gf.r_star[2].abs() < 1e-13);
            assert!(close(gf.gamma, -(6.0 + 2.0 * l) / (2.0 + l)));
            // γ̂ = −γ − 3
            assert!(close(p.gamma_hat(), -gf.gamma - 3.0));
        }
    }

    #[test]
    fn cd_seeds() {
        let s = cd_sequences(params(1.0), 10).unwrap();
        assert_eq!(s.c(1), 6.0);
        assert_eq!(s.d(1), 2.0);
        assert_eq!(s.d(2), 19.0);
        assert_eq!(s.c(3), 526.0);
    }

    #[test]
    fn cd_low_orders_match_chain_solution() {
        let l = 0.6;
        let s = cd_sequences(params(l), 8).unwrap();
        let pi = solve_stationary(&FrontChain::diagonal(l, 200).unwrap(), 1.0).unwrap();
        for n in 1..=6 {
            let affine = s.c(n) * pi.pi0() - s.d(n);
            assert!((pi.probs[n] - affine).abs() < 1e-9 * s.c(n), "n={n}");
        }
    }

    #[test]
    fn closed_form_matches_chain_values() {
        // 40-digit chain solves at K = 200
        let cases = [
            (0.0, 0.292_258_226_870_148_9),
            (0.5, 0.355_385_717_792_216_3),
            (1.0, 0.406_889_605_995_935),
            (2.0, 0.486_987_291_654_509_3),
            (5.0, 0.632_160_736_362_367_1),
        ];
        for (l, expected) in cases {
            let pi0 = pi0_diagonal(params(l)).unwrap();
            assert!((pi0 - expected).abs() < 1e-12, "λ={l}: {pi0}");
            let chain = solve_stationary(&FrontChain::diagonal(l, 200).unwrap(), 1.0).unwrap();
            assert!((chain.pi0() - pi0).abs() < 1e-10);
        }
    }

    #[test]
    fn limits_route_matches_fraction() {
        for &l in &[0.0, 0.5, 1.0, 2.0, 5.0] {
            let p = params(l);
            let a = pi0_diagonal(p).unwrap();
            let b = pi0_from_limits(p).unwrap();
            assert!((a - b).abs() < 1e-12, "λ={l}");
        }
    }

    #[test]
    fn ratio_route() {
        for &l in &[0.0, 0.5, 1.0, 2.0] {
            let p = params(l);
            let s = cd_sequences(p, 100).unwrap();
            let pi0 = pi0_diagonal(p).unwrap();
            assert!((s.ratio(100) - pi0).abs() <= 1e-5);
            assert!((s.ratio(80) - pi0).abs() <= 1e-6);
        }
    }

    #[test]
    fn lambda_zero_identities() {
        let p = params(0.0);
        let general = pi0_diagonal(p).unwrap();
        let special = pi0_lambda_zero().unwrap();
        assert!((general - special).abs() < 1e-12);
        let speed = speed_diagonal(p).unwrap().speed;
        assert!((1.0 / speed - time_constant_lambda_zero().unwrap()).abs() < 1e-12);
        assert!((speed - 2.58).abs() < 0.02);
    }

    #[test]
    fn speeds_increasing_and_bounded() {
        let grid = [0.0, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0, 1e3];
        let v: Vec<f64> = grid.iter().map(|&l| speed_diagonal(params(l)).unwrap().speed).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
        assert!(v.iter().all(|&s| s > 2.0 && s < 4.0));
        assert!(v[7] > 3.9);
        assert!((v[2] - 2.81).abs() < 0.02 && (v[3] - 2.97).abs() < 0.02);
    }
}
