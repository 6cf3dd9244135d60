//! Truncated continuous-time Markov chains for front processes.
//!
//! A [`FrontChain`] holds the top-left K×K corner of an intensity matrix
//! together with the rate at which the infection height advances in each
//! state. The corner is taken verbatim, so the last row keeps its true
//! diagonal and leaks the mass that would leave the truncation.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::{Method, SpeedResult};

/// Largest truncation the adaptive solve will try.
pub const TRUNCATION_CAP: usize = 3200;

/// Entries of the solved distribution above this negative value are noise.
const NEGATIVE_CLAMP: f64 = -1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("generator is not a valid truncated intensity matrix: {0}")]
    InvalidGenerator(String),
    #[error("balance equations are singular at truncation {0}")]
    Singular(usize),
    #[error("tail mass {tail:e} still above {tol:e} at truncation {k} (cap {cap})")]
    TruncationCapExceeded {
        k: usize,
        tail: f64,
        tol: f64,
        cap: usize,
    },
    #[error("stationary entry {index} is {value:e}, below the clamp threshold")]
    NegativeProbability { index: usize, value: f64 },
    #[error("dimension mismatch: chain has {chain} states, distribution has {dist}")]
    DimensionMismatch { chain: usize, dist: usize },
}

/// Which front process a chain truncates; decides how it can be regrown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainFamily {
    /// Plain ladder, vertical intensity λ, horizontal intensity 1.
    Ladder { lambda: f64 },
    /// Ladder with diagonals, vertical intensity λ, others 1.
    Diagonal { lambda: f64 },
    /// User-supplied generator with no rule for enlarging it.
    Fixed,
}

/// Top-left corner of the ladder intensity matrix.
pub fn ladder_generator(lambda: f64, size: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(size, size);
    if size == 0 {
        return q;
    }
    q[(0, 0)] = -2.0;
    if size > 1 {
        q[(0, 1)] = 2.0;
    }
    for n in 1..size {
        for j in 0..n.saturating_sub(1) {
            q[(n, j)] = lambda;
        }
        q[(n, n - 1)] = 1.0 + lambda;
        q[(n, n)] = -2.0 - n as f64 * lambda;
        if n + 1 < size {
            q[(n, n + 1)] = 1.0;
        }
    }
    q
}

/// Top-left corner of the intensity matrix for the ladder with diagonals.
pub fn diagonal_generator(lambda: f64, size: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(size, size);
    if size == 0 {
        return q;
    }
    q[(0, 0)] = -4.0;
    if size > 1 {
        q[(0, 1)] = 4.0;
        q[(1, 0)] = 2.0 + lambda;
        q[(1, 1)] = -4.0 - lambda;
        if size > 2 {
            q[(1, 2)] = 2.0;
        }
    }
    for n in 2..size {
        q[(n, 0)] = 1.0 + lambda;
        for j in 1..n - 1 {
            q[(n, j)] = 2.0 + lambda;
        }
        q[(n, n - 1)] = 3.0 + lambda;
        q[(n, n)] = -(2.0 * n as f64 + 2.0) - n as f64 * lambda;
        if n + 1 < size {
            q[(n, n + 1)] = 2.0;
        }
    }
    q
}

fn family_advance_rates(family: ChainFamily, size: usize) -> Option<Vec<f64>> {
    let (flat, raised) = match family {
        ChainFamily::Ladder { .. } => (2.0, 1.0),
        ChainFamily::Diagonal { .. } => (4.0, 2.0),
        ChainFamily::Fixed => return None,
    };
    let mut r = vec![raised; size];
    if let Some(first) = r.first_mut() {
        *first = flat;
    }
    Some(r)
}

/// Truncated front-process generator plus per-state height-advance rates.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontChain {
    generator: DMatrix<f64>,
    advance_rate: Vec<f64>,
    family: ChainFamily,
}

impl FrontChain {
    /// Wraps an arbitrary generator. Off-diagonal entries must be
    /// non-negative and every row must sum to at most zero.
    pub fn new(generator: DMatrix<f64>, advance_rate: Vec<f64>) -> Result<Self, ChainError> {
        Self::checked(generator, advance_rate, ChainFamily::Fixed)
    }

    pub fn ladder(lambda: f64, k: usize) -> Result<Self, ChainError> {
        let family = ChainFamily::Ladder { lambda };
        Self::checked(
            ladder_generator(lambda, k),
            family_advance_rates(family, k).unwrap_or_default(),
            family,
        )
    }

    pub fn diagonal(lambda: f64, k: usize) -> Result<Self, ChainError> {
        let family = ChainFamily::Diagonal { lambda };
        Self::checked(
            diagonal_generator(lambda, k),
            family_advance_rates(family, k).unwrap_or_default(),
            family,
        )
    }

    fn checked(
        generator: DMatrix<f64>,
        advance_rate: Vec<f64>,
        family: ChainFamily,
    ) -> Result<Self, ChainError> {
        let k = generator.nrows();
        if k == 0 || generator.ncols() != k {
            return Err(ChainError::InvalidGenerator(format!(
                "expected a non-empty square matrix, got {}x{}",
                k,
                generator.ncols()
            )));
        }
        if advance_rate.len() != k {
            return Err(ChainError::DimensionMismatch {
                chain: k,
                dist: advance_rate.len(),
            });
        }
        for i in 0..k {
            let mut row_sum = 0.0;
            let mut scale = 0.0_f64;
            for j in 0..k {
                let q = generator[(i, j)];
                if !q.is_finite() || (i != j && q < 0.0) {
                    return Err(ChainError::InvalidGenerator(format!(
                        "entry ({i}, {j}) = {q}"
                    )));
                }
                row_sum += q;
                scale = scale.max(q.abs());
            }
            if row_sum > 1e-12 * scale.max(1.0) {
                return Err(ChainError::InvalidGenerator(format!(
                    "row {i} sums to {row_sum} > 0"
                )));
            }
        }
        Ok(Self {
            generator,
            advance_rate,
            family,
        })
    }

    pub fn truncation(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn advance_rate(&self) -> &[f64] {
        &self.advance_rate
    }

    pub fn family(&self) -> ChainFamily {
        self.family
    }

    /// Same family at a different truncation; `None` for fixed generators.
    pub fn with_truncation(&self, k: usize) -> Option<Result<Self, ChainError>> {
        match self.family {
            ChainFamily::Ladder { lambda } => Some(Self::ladder(lambda, k)),
            ChainFamily::Diagonal { lambda } => Some(Self::diagonal(lambda, k)),
            ChainFamily::Fixed => None,
        }
    }

    /// Rate lost past the truncation from state `i` (minus the row sum).
    fn leak(&self, i: usize) -> f64 {
        -self.generator.row(i).sum()
    }
}

/// Probability vector over front-process states plus an estimate of the
/// mass beyond the last stored state.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDist {
    pub probs: Vec<f64>,
    pub tail_bound: f64,
}

impl StationaryDist {
    pub fn pi0(&self) -> f64 {
        self.probs[0]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Σπ + tail; should be within 1e-9 of one.
    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.tail_bound
    }
}

fn solve_fixed(chain: &FrontChain) -> Result<StationaryDist, ChainError> {
    let k = chain.truncation();
    // ΠQ = 0  <=>  Qᵀ Πᵀ = 0; the equation for column 0 becomes Σπ = 1
    let mut a = chain.generator.transpose();
    a.row_mut(0).fill(1.0);
    let mut rhs = DVector::zeros(k);
    rhs[0] = 1.0;
    let sol = a.lu().solve(&rhs).ok_or(ChainError::Singular(k))?;
    let mut probs = Vec::with_capacity(k);
    for (index, &p) in sol.iter().enumerate() {
        if !p.is_finite() {
            return Err(ChainError::Singular(k));
        }
        if p < NEGATIVE_CLAMP {
            return Err(ChainError::NegativeProbability { index, value: p });
        }
        probs.push(p.max(0.0));
    }
    // cut balance between {0..K-1} and the states beyond: the leak out of
    // state K-1 returns through downward jumps, which are at least as fast
    // from deeper states as from K-1 itself
    let last = k - 1;
    let up = chain.leak(last).max(0.0);
    let tail_bound = if up == 0.0 || k == 1 {
        0.0
    } else {
        let down: f64 = (0..last).map(|j| chain.generator[(last, j)]).sum();
        if down > 0.0 {
            probs[last] * up / down
        } else {
            f64::INFINITY
        }
    };
    Ok(StationaryDist { probs, tail_bound })
}

/// Solves ΠQ_K = 0, Σπ = 1. If the tail estimate exceeds `tol` the chain is
/// regrown with doubled truncation, up to [`TRUNCATION_CAP`].
pub fn solve_stationary(chain: &FrontChain, tol: f64) -> Result<StationaryDist, ChainError> {
    let mut current = chain.clone();
    loop {
        let dist = solve_fixed(&current)?;
        if dist.tail_bound <= tol {
            return Ok(dist);
        }
        let k = current.truncation();
        let next = 2 * k;
        match current.with_truncation(next) {
            Some(grown) if next <= TRUNCATION_CAP => current = grown?,
            _ => {
                return Err(ChainError::TruncationCapExceeded {
                    k,
                    tail: dist.tail_bound,
                    tol,
                    cap: TRUNCATION_CAP,
                })
            }
        }
    }
}

/// ‖ΠQ_K‖∞ for a solved distribution, together with ‖Q_K‖∞ for scaling.
pub fn balance_residual(chain: &FrontChain, dist: &StationaryDist) -> Result<(f64, f64), ChainError> {
    let q = chain_for(chain, dist.len())?;
    let k = q.truncation();
    let pi = DVector::from_column_slice(&dist.probs);
    let flow = q.generator.transpose() * pi;
    let residual = flow.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let norm = (0..k)
        .map(|i| q.generator.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    Ok((residual, norm))
}

fn chain_for(chain: &FrontChain, len: usize) -> Result<FrontChain, ChainError> {
    if chain.truncation() == len {
        return Ok(chain.clone());
    }
    match chain.with_truncation(len) {
        Some(c) => c,
        None => Err(ChainError::DimensionMismatch {
            chain: chain.truncation(),
            dist: len,
        }),
    }
}

/// Speed = Σ advance_rate[n]·π_n, with error bound max(rate)·tail.
///
/// A distribution from an adaptively regrown solve is accepted as long as
/// the chain's family can be rebuilt at that size.
pub fn speed_at_stationarity(
    chain: &FrontChain,
    dist: &StationaryDist,
) -> Result<SpeedResult, ChainError> {
    let rates = if chain.truncation() == dist.len() {
        chain.advance_rate.clone()
    } else {
        family_advance_rates(chain.family, dist.len()).ok_or(ChainError::DimensionMismatch {
            chain: chain.truncation(),
            dist: dist.len(),
        })?
    };
    let speed = rates.iter().zip(&dist.probs).map(|(r, p)| r * p).sum();
    let max_rate = rates.iter().cloned().fold(0.0_f64, f64::max);
    Ok(SpeedResult {
        speed,
        pi0: Some(dist.pi0()),
        method: Method::ChainSolve,
        error_bound: Some(max_rate * dist.tail_bound),
        confidence_interval: None,
    })
}

/// Ladder or diagonal chain solved at truncation `k` (regrown if needed).
pub fn solve_family(
    family: ChainFamily,
    k: usize,
    tol: f64,
) -> Result<(FrontChain, StationaryDist), ChainError> {
    let chain = match family {
        ChainFamily::Ladder { lambda } => FrontChain::ladder(lambda, k)?,
        ChainFamily::Diagonal { lambda } => FrontChain::diagonal(lambda, k)?,
        ChainFamily::Fixed => {
            return Err(ChainError::InvalidGenerator(
                "a fixed chain has no generator rule".into(),
            ))
        }
    };
    let dist = solve_stationary(&chain, tol)?;
    let chain = chain_for(&chain, dist.len())?;
    Ok((chain, dist))
}
