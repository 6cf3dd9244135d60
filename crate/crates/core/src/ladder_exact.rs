//! Exact front speed on the ladder with vertical intensity λ and horizontal
//! intensity 1.
//!
//! With π_n the stationary probability that the upper row leads by n,
//! π_n = a_n π₀ − b_n where a_n, b_n share one recursion, and
//!
//! ```text
//! π₀ = [(2λ²+4λ+1)Ĵ₁ − (λ+1)Ĵ₂] / [(2λ²+8λ+5)Ĵ₁ − (λ+3)Ĵ₂],
//! Ĵ_n = J_{n+1+2/λ}(2/λ).
//! ```
//!
//! The front advances at rate 2 from the level state and 1 otherwise, so the
//! speed is 1 + π₀.

use nalgebra::DMatrix;

use crate::front_chain::{ladder_generator, StationaryDist};
use crate::specfun::{BesselFrame, SpecialFunctionError, Tolerance};
use crate::{check_range, ExactError, Method, SpeedResult};

pub const LAMBDA_MIN: f64 = 0.04;
pub const LAMBDA_MAX: f64 = 1e3;

/// Rescale the a/b recursion once |a| passes this.
const RESCALE_AT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderParams {
    lambda: f64,
}

impl LadderParams {
    pub fn new(lambda: f64) -> Result<Self, ExactError> {
        check_range("lambda", lambda, LAMBDA_MIN, LAMBDA_MAX).map(|lambda| Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// A = 2 + λ, B = λ.
    pub fn frame(&self) -> BesselFrame {
        BesselFrame::new(2.0 + self.lambda, self.lambda).expect("λ > 0 by construction")
    }
}

/// Top-left `size`×`size` corner of the ladder front-process generator.
pub fn build_q_ladder(p: LadderParams, size: usize) -> Result<DMatrix<f64>, ExactError> {
    if size < 5 {
        return Err(ExactError::ParameterOutOfRange {
            name: "size",
            value: size as f64,
            min: 5.0,
            max: f64::INFINITY,
        });
    }
    Ok(ladder_generator(p.lambda, size))
}

/// π_n = a_n π₀ − b_n for n = 0..=n_max, kept in scaled form.
///
/// a_n grows like Γ(n)λⁿ, so the pair is stored as a_n / e^{s_n} and
/// b_n / e^{s_n} with a running log scale s_n.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSeq {
    a_scaled: Vec<f64>,
    b_scaled: Vec<f64>,
    log_scale: Vec<f64>,
}

impl AffineSeq {
    pub fn len(&self) -> usize {
        self.a_scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_scaled.is_empty()
    }

    /// a_n; infinite once it leaves the f64 range.
    pub fn a(&self, n: usize) -> f64 {
        self.a_scaled[n] * self.log_scale[n].exp()
    }

    pub fn b(&self, n: usize) -> f64 {
        self.b_scaled[n] * self.log_scale[n].exp()
    }

    /// b_n / a_n, which tends to π₀.
    pub fn ratio(&self, n: usize) -> f64 {
        self.b_scaled[n] / self.a_scaled[n]
    }

    pub fn ln_abs_a(&self, n: usize) -> f64 {
        self.a_scaled[n].abs().ln() + self.log_scale[n]
    }
}

pub fn ab_sequences(p: LadderParams, n_max: usize) -> Result<AffineSeq, ExactError> {
    if n_max < 3 {
        return Err(ExactError::ParameterOutOfRange {
            name: "n_max",
            value: n_max as f64,
            min: 3.0,
            max: f64::INFINITY,
        });
    }
    let l = p.lambda;
    let l2 = l * l;
    let l3 = l2 * l;
    affine_recursion(
        [1.0, 2.0 + l, 2.0 * l2 + 7.0 * l + 2.0, 6.0 * l3 + 26.0 * l2 + 22.0 * l + 2.0],
        [0.0, l, 2.0 * l2 + 3.0 * l, 6.0 * l3 + 14.0 * l2 + 6.0 * l],
        n_max,
        |n| (l * n + 3.0, l * (n - 2.0) + 3.0, 1.0),
    )
}

/// Runs x_n = k1 x_{n−1} − k2 x_{n−2} + k3 x_{n−3} on two seed quadruples
/// (n = 0..=3) with a shared running scale; `coef(n)` gives (k1, k2, k3).
pub(crate) fn affine_recursion(
    a_seed: [f64; 4],
    b_seed: [f64; 4],
    n_max: usize,
    coef: impl Fn(f64) -> (f64, f64, f64),
) -> Result<AffineSeq, ExactError> {
    let mut a = a_seed.to_vec();
    let mut b = b_seed.to_vec();
    let mut log_scale = vec![0.0; 4];
    for n in 4..=n_max {
        let nf = n as f64;
        let (k1, k2, k3) = coef(nf);
        let an = k1 * a[n - 1] - k2 * a[n - 2] + k3 * a[n - 3];
        let bn = k1 * b[n - 1] - k2 * b[n - 2] + k3 * b[n - 3];
        let mut s = log_scale[n - 1];
        a.push(an);
        b.push(bn);
        if an.abs() > RESCALE_AT {
            // rescale the three entries the next step will read
            let f = an.abs();
            for k in n - 2..=n {
                a[k] /= f;
                b[k] /= f;
            }
            s += f.ln();
            log_scale[n - 2] = s;
            log_scale[n - 1] = s;
        }
        if !a[n].is_finite() || !b[n].is_finite() {
            return Err(SpecialFunctionError::Overflow {
                function: "affine_recursion",
                x: nf,
            }
            .into());
        }
        log_scale.push(s);
    }
    a.truncate(n_max + 1);
    b.truncate(n_max + 1);
    log_scale.truncate(n_max + 1);
    Ok(AffineSeq {
        a_scaled: a,
        b_scaled: b,
        log_scale,
    })
}

fn hat_pair(p: LadderParams) -> Result<(f64, f64), ExactError> {
    let f = p.frame();
    let tol = Tolerance::default();
    Ok((f.j_hat(1, tol)?, f.j_hat(2, tol)?))
}

fn normalizer(l: f64, j1: f64, j2: f64) -> f64 {
    (2.0 * l * l + 8.0 * l + 5.0) * j1 - (l + 3.0) * j2
}

/// Stationary probability that both rows are level.
pub fn pi0_bessel(p: LadderParams) -> Result<f64, ExactError> {
    let l = p.lambda;
    let (j1, j2) = hat_pair(p)?;
    Ok(((2.0 * l * l + 4.0 * l + 1.0) * j1 - (l + 1.0) * j2) / normalizer(l, j1, j2))
}

/// π_0..=π_K from π_n = c(Ĵ_{n−1} − Ĵ_n); the mass beyond K is cĴ_K.
pub fn stationary_ladder(p: LadderParams, k: usize) -> Result<StationaryDist, ExactError> {
    if k < 10 {
        return Err(ExactError::ParameterOutOfRange {
            name: "K",
            value: k as f64,
            min: 10.0,
            max: f64::INFINITY,
        });
    }
    let l = p.lambda;
    let f = p.frame();
    let tol = Tolerance::default();
    let hats = (0..=k as i64)
        .map(|n| f.j_hat(n, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let c = 2.0 / normalizer(l, hats[1], hats[2]);
    let mut probs = Vec::with_capacity(k + 1);
    probs.push(pi0_bessel(p)?);
    for n in 1..=k {
        let v = c * (hats[n - 1] - hats[n]);
        probs.push(if (-1e-12..0.0).contains(&v) { 0.0 } else { v });
    }
    Ok(StationaryDist {
        probs,
        tail_bound: (c * hats[k]).max(0.0),
    })
}

pub fn speed_ladder(p: LadderParams) -> Result<SpeedResult, ExactError> {
    let pi0 = pi0_bessel(p)?;
    Ok(SpeedResult {
        speed: 1.0 + pi0,
        pi0: Some(pi0),
        method: Method::ExactBessel,
        error_bound: None,
        confidence_interval: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front_chain::{solve_stationary, FrontChain};
    use crate::specfun::delta;

    fn params(l: f64) -> LadderParams {
        LadderParams::new(l).unwrap()
    }

    fn chain_pi(l: f64, k: usize) -> StationaryDist {
        solve_stationary(&FrontChain::ladder(l, k).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn regime_is_enforced() {
        assert!(LadderParams::new(0.03).is_err());
        assert!(LadderParams::new(1001.0).is_err());
        assert!(LadderParams::new(f64::NAN).is_err());
        assert!(build_q_ladder(params(1.0), 4).is_err());
    }

    #[test]
    fn q_rows() {
        let q = build_q_ladder(params(1.0), 6).unwrap();
        let r3: Vec<f64> = q.row(3).iter().copied().collect();
        assert_eq!(r3, [1.0, 1.0, 2.0, -5.0, 1.0, 0.0]);
    }

    #[test]
    fn ab_initial_values() {
        for &l in &[0.3, 1.0, 2.5] {
            let s = ab_sequences(params(l), 10).unwrap();
            assert_eq!(s.a(1), 2.0 + l);
            assert_eq!(s.b(1), l);
            assert!((s.a(2) - (2.0 * l * l + 7.0 * l + 2.0)).abs() < 1e-12);
            assert!((s.b(2) - (2.0 * l * l + 3.0 * l)).abs() < 1e-12);
            let a3 = 6.0 * l.powi(3) + 26.0 * l * l + 22.0 * l + 2.0;
            assert!((s.a(3) - a3).abs() < 1e-12 * a3);
        }
    }

    #[test]
    fn ab_low_orders_match_chain_solution() {
        let l = 0.7;
        let s = ab_sequences(params(l), 8).unwrap();
        let pi = chain_pi(l, 200);
        for n in 1..=6 {
            let affine = s.a(n) * pi.pi0() - s.b(n);
            assert!((pi.probs[n] - affine).abs() < 1e-9 * s.a(n), "n={n}");
        }
    }

    #[test]
    fn ab_match_delta_combinations() {
        for &l in &[0.5, 1.0, 2.0] {
            let f = params(l).frame();
            let s = ab_sequences(params(l), 8).unwrap();
            for n in 1..=8usize {
                let ni = n as i64;
                let a = (2.0 * l * l + 8.0 * l + 5.0) / l * delta(ni, 1, &f).unwrap()
                    - (l + 3.0) / l * delta(ni, 2, &f).unwrap();
                let b = (2.0 * l * l + 4.0 * l + 1.0) / l * delta(ni, 1, &f).unwrap()
                    - (l + 1.0) / l * delta(ni, 2, &f).unwrap();
                assert!((a - s.a(n)).abs() < 1e-7 * s.a(n).abs(), "λ={l} n={n}: {a} vs {}", s.a(n));
                assert!((b - s.b(n)).abs() < 1e-7 * s.b(n).abs(), "λ={l} n={n}");
            }
        }
    }

    #[test]
    fn ratio_converges_to_closed_form() {
        for &l in &[0.5, 1.0, 2.0, 5.0] {
            let p = params(l);
            let s = ab_sequences(p, 500).unwrap();
            let pi0 = pi0_bessel(p).unwrap();
            for n in [60, 100, 300, 500] {
                assert!((s.ratio(n) - pi0).abs() <= 1e-8, "λ={l} n={n}");
            }
        }
        let s = ab_sequences(params(1.0), 60).unwrap();
        assert!((s.ratio(60) - pi0_bessel(params(1.0)).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn scaled_sequence_stays_finite() {
        let s = ab_sequences(params(LAMBDA_MAX), 500).unwrap();
        assert!(s.ln_abs_a(500) > 700.0);
        assert!(s.ratio(500).is_finite());
    }

    #[test]
    fn closed_form_matches_chain_solve() {
        // 40-digit chain solves at K = 200
        let cases = [
            (0.5, 0.360_689_105_802_949_4),
            (1.0, 0.464_718_427_628_694_6),
            (2.0, 0.585_899_118_491_871_8),
            (5.0, 0.747_355_285_115_662_5),
        ];
        for (l, expected) in cases {
            let pi0 = pi0_bessel(params(l)).unwrap();
            assert!((pi0 - expected).abs() < 1e-12, "λ={l}: {pi0}");
            assert!((chain_pi(l, 200).pi0() - pi0).abs() < 1e-8);
        }
    }

    #[test]
    fn bessel_order_examples() {
        use crate::specfun::bessel_j;
        let t = Tolerance::default();
        let j = |n: f64, z: f64| bessel_j(n, z, t).unwrap();
        let l1 = (7.0 * j(4.0, 2.0) - 2.0 * j(5.0, 2.0)) / (15.0 * j(4.0, 2.0) - 4.0 * j(5.0, 2.0));
        assert!((pi0_bessel(params(1.0)).unwrap() - l1).abs() < 1e-14);
        let l2 = (17.0 * j(3.0, 1.0) - 3.0 * j(4.0, 1.0)) / (29.0 * j(3.0, 1.0) - 5.0 * j(4.0, 1.0));
        assert!((pi0_bessel(params(2.0)).unwrap() - l2).abs() < 1e-14);
    }

    #[test]
    fn stationary_partial_sums_and_chain() {
        let p = params(1.0);
        let d = stationary_ladder(p, 100).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-10);
        assert!(d.probs.iter().all(|&x| x >= 0.0));
        let chain = chain_pi(1.0, 100);
        let diff = d
            .probs
            .iter()
            .zip(&chain.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-8, "{diff}");
    }

    #[test]
    fn stationary_balance_interior() {
        for &l in &[0.1, 1.0, 20.0] {
            let k = 60;
            let d = stationary_ladder(params(l), k).unwrap();
            let q = ladder_generator(l, k + 1);
            let total: f64 = d.probs.iter().sum();
            for col in 0..k {
                let flow: f64 = (0..=k).map(|j| d.probs[j] / total * q[(j, col)]).sum();
                assert!(flow.abs() <= 1e-7, "λ={l} col={col}: {flow}");
            }
        }
    }

    #[test]
    fn speed_values() {
        let s = speed_ladder(params(1.0)).unwrap();
        assert_eq!(s.method, Method::ExactBessel);
        // 1.47 is a rounded reading of 1.46472
        assert!((s.speed - 1.47).abs() < 0.01);
        let doubled = 2.0 * speed_ladder(params(0.5)).unwrap().speed;
        assert!((doubled - 2.72).abs() < 0.005);
        let big = speed_ladder(params(LAMBDA_MAX)).unwrap().speed;
        assert!(big > 1.99 && big < 2.0);
    }

    #[test]
    fn speed_increasing_and_bounded() {
        let grid = [0.04, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 1e3];
        let v: Vec<f64> = grid.iter().map(|&l| speed_ladder(params(l)).unwrap().speed).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
        assert!(v.iter().all(|&s| s > 1.0 && s < 2.0));
    }
}
