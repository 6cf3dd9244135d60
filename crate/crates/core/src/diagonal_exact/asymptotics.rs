//! Brute-force coefficient sums used to check the limits L_i, and the
//! binomial-factorial sum 𝒜_m(K) behind them.

use super::DiagParams;
use crate::specfun::{ln_gamma, CompensatedSum};
use crate::ExactError;

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for k in 1..=n {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// F̂_i(M) / (M! M^power), with
///
/// ```text
/// F̂_i(M) = Σ_{2k+l+m=M} (−C)^k/k! · (k+i+γ̂+1)^{(l)}/l! · (m+1)
///           · Σ_{n=0}^{m} C(m,n) α^{m−n} (k+l+n)!
/// ```
///
/// Every term is formed in log space relative to M! before summation.
pub fn fhat_ratio(p: DiagParams, i: usize, big_m: usize, power: f64) -> Result<f64, ExactError> {
    let a = p.alpha();
    let g = p.gamma_hat();
    let ln_c = (2.0 * a * a).ln();
    let ln_a = a.ln();
    let lf = ln_factorials(big_m + 1);
    let shift = lf[big_m] + power * (big_m as f64).ln();
    let mut acc = CompensatedSum::default();
    let mut inner = Vec::with_capacity(big_m + 1);
    for k in 0..=big_m / 2 {
        let base = k as f64 + i as f64 + g + 1.0;
        let ln_base = ln_gamma(base)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let head = k as f64 * ln_c - lf[k] - shift;
        for l in 0..=big_m - 2 * k {
            let m = big_m - 2 * k - l;
            let rising = ln_gamma(base + l as f64)? - ln_base;
            inner.clear();
            for n in 0..=m {
                inner.push(lf[m] - lf[n] - lf[m - n] + (m - n) as f64 * ln_a + lf[k + l + n]);
            }
            let log_term = head + rising - lf[l] + ((m + 1) as f64).ln() + log_sum_exp(&inner);
            acc.add(sign * log_term.exp());
        }
    }
    Ok(acc.value())
}

/// 𝒜_m(K) / ((m+K)! e^{αm/(m+K)}) with 𝒜_m(K) = Σ_{j=0}^{m} C(m,j) α^j (m+K−j)!,
/// evaluated as Σ_j α^j/j! Π_{i<j} (m−i)/(m+K−i). Tends to 1 as m grows.
pub fn script_a_ratio(alpha: f64, m: usize, k: f64) -> f64 {
    let mf = m as f64;
    let mut acc = CompensatedSum::default();
    let mut term = 1.0;
    for j in 0..=m {
        acc.add(term);
        let jf = j as f64;
        term *= alpha / (jf + 1.0) * (mf - jf) / (mf + k - jf);
        if term == 0.0 {
            break;
        }
    }
    acc.value() / (alpha * mf / (mf + k)).exp()
}
