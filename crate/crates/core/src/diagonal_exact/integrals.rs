//! The integrals I(n) = ∫₀¹ (1−x)^{γ̂+n} x e^{αx} dx, J(n) (same without the
//! factor x), and the limits L₀, L₁, L₂ built from them.

use super::sums::s_sums;
use super::DiagParams;
use crate::specfun::{factorial_falling, gamma, rgamma, CompensatedSum};
use crate::ExactError;

const SERIES_MAX: usize = 400;
const SERIES_EPS: f64 = 1e-17;

/// (I(n), J(n)) from the Taylor series of e^{αx} against Beta integrals:
/// J(n) = Σ_m α^m Γ(a)/Γ(a+m+1), I(n) = Σ_m (m+1) α^m Γ(a)/Γ(a+m+2),
/// a = γ̂+n+1. All terms are positive.
pub fn ij_integrals_beta(p: DiagParams, n: u32) -> Result<(f64, f64), ExactError> {
    let alpha = p.alpha();
    let a = p.gamma_hat() + f64::from(n) + 1.0;
    let mut t = 1.0 / a;
    let mut i_sum = CompensatedSum::default();
    let mut j_sum = CompensatedSum::default();
    for m in 0..SERIES_MAX {
        let mf = m as f64;
        let u = (mf + 1.0) * t / (a + mf + 1.0);
        j_sum.add(t);
        i_sum.add(u);
        if t <= SERIES_EPS * j_sum.value() && u <= SERIES_EPS * i_sum.value() {
            return Ok((i_sum.value(), j_sum.value()));
        }
        t *= alpha / (a + mf + 1.0);
    }
    Err(ExactError::NonConvergence {
        what: "Beta series for I(n), J(n)",
        terms: SERIES_MAX,
    })
}

/// (I(n), J(n)). n = 0 uses the Beta series; n ≥ 1 the integration-by-parts
/// closed forms in I(0), J(0), which lose roughly log₁₀(n!/αⁿ) digits.
pub fn ij_integrals(p: DiagParams, n: u32) -> Result<(f64, f64), ExactError> {
    let (i0, j0) = ij_integrals_beta(p, 0)?;
    if n == 0 {
        return Ok((i0, j0));
    }
    let alpha = p.alpha();
    let g = p.gamma_hat();
    let nf = f64::from(n);
    let top = g + nf;
    let mut tail = 0.0;
    for k in 0..n {
        tail += factorial_falling(top, k)? / alpha.powi(k as i32);
    }
    let j_n = factorial_falling(top, n)? / alpha.powi(n as i32) * j0 - tail / alpha;
    let mut corr = 0.0;
    for m in 1..=n {
        let mf = f64::from(m);
        corr += (nf + 1.0 - mf) * alpha.powi(m as i32) * rgamma(g + 1.0 + mf);
    }
    let i_n = gamma(g + nf + 1.0)? / alpha.powi(n as i32)
        * ((i0 - nf / alpha * j0) / gamma(g + 1.0)? + corr / (alpha * alpha));
    Ok((i_n, j_n))
}

/// L_i = lim F̂_i(M)/(M! M^{γ̂+1+i}) for i = 0, 1, 2 in assembled form:
/// α^{−i}[e^{−2α}(I(0)+2J(0))/Γ(γ̂+1) − i e^{−2α}J(0)/(αΓ(γ̂+1)) + S(i)/α²].
pub fn l_limits(p: DiagParams) -> Result<[f64; 3], ExactError> {
    let a = p.alpha();
    let (i0, j0) = ij_integrals_beta(p, 0)?;
    let s = s_sums(p)?;
    let e = (-2.0 * a).exp() * rgamma(p.gamma_hat() + 1.0);
    let mut out = [0.0; 3];
    for (i, si) in [s.s0, s.s1, s.s2].into_iter().enumerate() {
        let fi = i as f64;
        out[i] = (e * (i0 + 2.0 * j0) - fi * e * j0 / a + si / (a * a)) / a.powi(i as i32);
    }
    Ok(out)
}

/// L_i from the defining series Σ_k (−C)^k I(k+i) / (k! Γ(k+1+γ̂+i)),
/// with each I from the Beta series. Independent of [`l_limits`].
pub fn l_limits_direct(p: DiagParams) -> Result<[f64; 3], ExactError> {
    let a = p.alpha();
    let g = p.gamma_hat();
    let neg_c = -2.0 * a * a;
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut acc = CompensatedSum::default();
        // (−C)^k / k!
        let mut w = 1.0;
        let mut done = false;
        for k in 0..SERIES_MAX {
            let n = (k + i) as u32;
            let (ik, _) = ij_integrals_beta(p, n)?;
            let term = w * rgamma(k as f64 + 1.0 + g + i as f64) * ik;
            acc.add(term);
            if k >= 2 && term.abs() <= SERIES_EPS * acc.value().abs() {
                done = true;
                break;
            }
            w *= neg_c / (k as f64 + 1.0);
        }
        if !done {
            return Err(ExactError::NonConvergence {
                what: "series for L_i",
                terms: SERIES_MAX,
            });
        }
        *slot = acc.value();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(l: f64) -> DiagParams {
        DiagParams::new(l).unwrap()
    }

    /// Adaptive Simpson on [0, 1] after u = (1−x)^{γ̂+1}, which leaves the
    /// smooth integrand u^{n/(γ̂+1)} x e^{αx} / (γ̂+1), x = 1 − u^{1/(γ̂+1)}.
    fn quad_i(p: DiagParams, n: u32) -> f64 {
        let a = p.alpha();
        let s = p.gamma_hat() + 1.0;
        let f = move |u: f64| {
            let x = 1.0 - u.powf(1.0 / s);
            u.powf(f64::from(n) / s) * x * (a * x).exp() / s
        };
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
        let (fa, fm, fb) = (f(0.0), f(0.5), f(1.0));
        let whole = (fa + 4.0 * fm + fb) / 6.0;
        simpson(&f, 0.0, 1.0, fa, fm, fb, whole, 1e-13, 40)
    }

    #[test]
    fn i_plus_j_is_one_over_alpha() {
        for &l in &[0.0, 0.3, 1.0, 4.0, 1e3] {
            let p = params(l);
            let (i0, j0) = ij_integrals(p, 0).unwrap();
            assert!((i0 + j0 - 1.0 / p.alpha()).abs() < 1e-12 * (2.0 + l), "λ={l}");
        }
    }

    #[test]
    fn j0_elementary_at_lambda_zero() {
        let (_, j0) = ij_integrals(params(0.0), 0).unwrap();
        assert!((j0 - 2.0 * (0.5f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_quadrature_and_series() {
        let p = params(1.0);
        let (i3, _) = ij_integrals(p, 3).unwrap();
        assert!((i3 - quad_i(p, 3)).abs() < 1e-9, "{i3} vs {}", quad_i(p, 3));
        for &l in &[0.0, 0.5, 2.0] {
            let p = params(l);
            for n in 1..=8 {
                let (ci, cj) = ij_integrals(p, n).unwrap();
                let (bi, bj) = ij_integrals_beta(p, n).unwrap();
                // the closed forms cancel down from Γ(γ̂+n+1)/αⁿ
                let loss = gamma(p.gamma_hat() + f64::from(n) + 1.0).unwrap() / p.alpha().powi(n as i32);
                assert!((ci - bi).abs() < 1e-13 * loss, "λ={l} n={n}: {ci} vs {bi}");
                assert!((cj - bj).abs() < 1e-13 * loss, "λ={l} n={n}: {cj} vs {bj}");
            }
        }
    }

    #[test]
    fn limits_two_routes() {
        for &l in &[0.0, 0.5, 1.0, 2.0, 5.0] {
            let p = params(l);
            let a = l_limits(p).unwrap();
            let b = l_limits_direct(p).unwrap();
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-9 * b[i].abs().max(1.0), "λ={l} i={i}");
                assert!(a[i] > 0.0);
            }
        }
    }

    #[test]
    fn limits_reference_values() {
        // 40-digit evaluations
        let l1 = l_limits(params(1.0)).unwrap();
        let e1 = [0.791_068_896_650_348, 0.282_750_273_891_396, 0.075_023_807_144_810_7];
        let l0 = l_limits(params(0.0)).unwrap();
        let e0 = [0.601_076_933_134_868, 0.190_972_802_104_088, 0.046_403_294_481_068_5];
        for i in 0..3 {
            assert!((l1[i] - e1[i]).abs() < 1e-13);
            assert!((l0[i] - e0[i]).abs() < 1e-13);
        }
    }
}
