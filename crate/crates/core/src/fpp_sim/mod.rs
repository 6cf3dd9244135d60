//! Monte Carlo estimation of the front speed on any width-two ladder-like
//! graph with exponential edge passage times.
//!
//! With exponential passage times the next infection depends only on the
//! current infected set, so the process is simulated event by event
//! (Gillespie) instead of sampling every edge time up front.

mod graph;
mod process;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use graph::{validate, CheckedGraph, GraphSpec};
pub use process::{Infection, InfectionProcess, AUDIT_EVERY, AUDIT_TOL};

use crate::{Method, SpeedResult};

/// Smallest target height accepted for speed estimation.
pub const MIN_TARGET_HEIGHT: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("intensity for {edge} must be positive and finite, got {value}")]
    NonPositiveIntensity { edge: &'static str, value: f64 },
    #[error("no edge lets the infection gain height from the starting column")]
    NoPercolation,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("could not parse graph spec: {0}")]
    Parse(String),
    #[error("infection stalled at height {height} (replica {replica})")]
    Stalled { height: i64, replica: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub target_height: u64,
    pub replicas: usize,
    pub seed: u64,
    pub burn_in_height: u64,
}

impl SimConfig {
    /// Config with the default burn-in of 1% of the target height.
    pub fn new(target_height: u64, replicas: usize, seed: u64) -> Self {
        Self {
            target_height,
            replicas,
            seed,
            burn_in_height: target_height / 100,
        }
    }

    pub fn check(&self) -> Result<(), SimError> {
        if self.target_height < MIN_TARGET_HEIGHT {
            return Err(SimError::InvalidConfig(format!(
                "target height {} is below {MIN_TARGET_HEIGHT}",
                self.target_height
            )));
        }
        if self.burn_in_height >= self.target_height {
            return Err(SimError::InvalidConfig(format!(
                "burn-in height {} must be below the target height {}",
                self.burn_in_height, self.target_height
            )));
        }
        if self.replicas < 2 {
            return Err(SimError::InvalidConfig(format!(
                "need at least 2 replicas for an error estimate, got {}",
                self.replicas
            )));
        }
        Ok(())
    }
}

/// Random stream for one replica: ChaCha8 keyed by the seed, with the
/// replica index as the stream number.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Height gained per unit time between the burn-in and target heights.
pub fn run_replica(graph: &CheckedGraph, cfg: &SimConfig, replica: u64) -> Result<f64, SimError> {
    let mut rng = replica_rng(cfg.seed, replica);
    let mut p = InfectionProcess::new(graph);
    let target = cfg.target_height as i64;
    let burn = cfg.burn_in_height as i64;
    let mut t_burn = if burn == 0 { Some(0.0) } else { None };
    while p.front() < target {
        let ev = p.step(&mut rng).ok_or(SimError::Stalled {
            height: p.front(),
            replica,
        })?;
        if t_burn.is_none() && p.front() >= burn {
            t_burn = Some(ev.time);
        }
    }
    let t0 = t_burn.unwrap_or(0.0);
    Ok((target - burn) as f64 / (p.time() - t0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedEstimate {
    pub mean_speed: f64,
    pub std_error: f64,
    pub replicas: usize,
    pub per_replica: Vec<f64>,
}

impl SpeedEstimate {
    /// Mean and standard error (sample deviation / √n), summed in index
    /// order so the result does not depend on scheduling.
    pub fn from_replicas(per_replica: Vec<f64>) -> Self {
        let n = per_replica.len();
        let mean = per_replica.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            per_replica.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean_speed: mean,
            std_error: (var / n as f64).sqrt(),
            replicas: n,
            per_replica,
        }
    }

    /// (estimate − reference) / std_error.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean_speed - reference) / self.std_error
    }

    pub fn to_speed_result(&self) -> SpeedResult {
        let half = 1.96 * self.std_error;
        SpeedResult {
            speed: self.mean_speed,
            pi0: None,
            method: Method::MonteCarlo,
            error_bound: None,
            confidence_interval: Some((self.mean_speed - half, self.mean_speed + half)),
        }
    }
}

/// Runs `cfg.replicas` independent replicas in parallel.
pub fn estimate_speed(graph: &CheckedGraph, cfg: &SimConfig) -> Result<SpeedEstimate, SimError> {
    cfg.check()?;
    let speeds = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| run_replica(graph, cfg, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpeedEstimate::from_replicas(speeds))
}

/// Everything needed to reproduce an estimate, for writing out as TOML.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub mean: f64,
    pub stderr: f64,
    pub replicas: usize,
    pub seed: u64,
    pub target_height: u64,
    pub burn_in_height: u64,
    pub per_replica: Vec<f64>,
    pub graph: GraphSpec,
}

impl SimReport {
    pub fn new(estimate: &SpeedEstimate, cfg: &SimConfig, graph: &GraphSpec) -> Self {
        Self {
            mean: estimate.mean_speed,
            stderr: estimate.std_error,
            replicas: estimate.replicas,
            seed: cfg.seed,
            target_height: cfg.target_height,
            burn_in_height: cfg.burn_in_height,
            per_replica: estimate.per_replica.clone(),
            graph: *graph,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report always serializes")
    }
}
