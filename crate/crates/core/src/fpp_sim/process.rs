//! Gillespie dynamics of the infection on a sliding window of heights.
//!
//! The window starts at the watermark M_t, the largest height at which every
//! live level is infected, and ends one past the front N_t. Edges only join
//! equal or adjacent heights, so once both vertices at height M are infected
//! nothing below M can influence infection times above it; those columns are
//! dropped. Heights below 0 are never materialized: any path that leaves
//! through the back re-enters through an infected start vertex.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::Exp1;

use super::graph::CheckedGraph;

/// Steps between full recomputations of the frontier rates.
pub const AUDIT_EVERY: u64 = 10_000;
/// Relative mismatch tolerated between incremental and recomputed totals.
pub const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Cell {
    infected: bool,
    /// Total intensity from infected neighbours (0 once infected).
    rate: f64,
}

/// One infection event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infection {
    pub height: i64,
    pub level: usize,
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct InfectionProcess<'g> {
    graph: &'g CheckedGraph,
    cols: VecDeque<[Cell; 2]>,
    base: i64,
    front: i64,
    time: f64,
    total: f64,
    steps: u64,
    audit_failures: u64,
    max_window: usize,
    prune: bool,
}

impl<'g> InfectionProcess<'g> {
    /// Starts from V₀ = {(0,0), (0,1)} at time 0.
    pub fn new(graph: &'g CheckedGraph) -> Self {
        Self::build(graph, true)
    }

    /// Same dynamics without dropping columns below the watermark; used to
    /// check that pruning does not change trajectories.
    pub fn without_pruning(graph: &'g CheckedGraph) -> Self {
        Self::build(graph, false)
    }

    fn build(graph: &'g CheckedGraph, prune: bool) -> Self {
        let mut p = Self {
            graph,
            cols: VecDeque::from([[Cell::default(); 2]]),
            base: 0,
            front: 0,
            time: 0.0,
            total: 0.0,
            steps: 0,
            audit_failures: 0,
            max_window: 1,
            prune,
        };
        p.infect(0, 0);
        p.infect(0, 1);
        p
    }

    /// N_t: largest infected height.
    pub fn front(&self) -> i64 {
        self.front
    }

    /// M_t: lowest height still held in the window.
    pub fn watermark(&self) -> i64 {
        self.base
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn total_rate(&self) -> f64 {
        self.total
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn audit_failures(&self) -> u64 {
        self.audit_failures
    }

    /// Largest number of columns held at once.
    pub fn max_window(&self) -> usize {
        self.max_window
    }

    pub fn is_infected(&self, height: i64, level: usize) -> bool {
        if height < self.base {
            return height >= 0 && self.graph.alive(level);
        }
        self.cols
            .get((height - self.base) as usize)
            .is_some_and(|c| c[level].infected)
    }

    fn infect(&mut self, x: i64, s: usize) {
        let i = (x - self.base) as usize;
        let cell = &mut self.cols[i][s];
        cell.infected = true;
        self.total -= cell.rate;
        cell.rate = 0.0;
        for &(dx, t, r) in self.graph.links(s) {
            let y = x + dx;
            if y < self.base {
                continue;
            }
            let j = (y - self.base) as usize;
            while self.cols.len() <= j {
                self.cols.push_back([Cell::default(); 2]);
            }
            let nb = &mut self.cols[j][t];
            if !nb.infected {
                nb.rate += r;
                self.total += r;
            }
        }
        self.front = self.front.max(x);
        if self.prune {
            while self.cols.len() >= 2 && self.complete(1) {
                self.cols.pop_front();
                self.base += 1;
            }
        }
        self.max_window = self.max_window.max(self.cols.len());
    }

    fn complete(&self, i: usize) -> bool {
        (0..2).all(|s| !self.graph.alive(s) || self.cols[i][s].infected)
    }

    /// Advances by one infection. `None` if no uninfected vertex has an
    /// infected neighbour (cannot happen for a validated graph).
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Infection> {
        if self.total <= 0.0 {
            return None;
        }
        let e: f64 = rng.sample(Exp1);
        let u: f64 = rng.random::<f64>() * self.total;
        self.time += e / self.total;
        let mut acc = 0.0;
        let mut pick = None;
        'scan: for (i, col) in self.cols.iter().enumerate() {
            for (s, cell) in col.iter().enumerate() {
                if cell.rate > 0.0 {
                    acc += cell.rate;
                    pick = Some((i, s));
                    if acc > u {
                        break 'scan;
                    }
                }
            }
        }
        let (i, s) = pick?;
        let x = self.base + i as i64;
        self.infect(x, s);
        self.steps += 1;
        if self.steps.is_multiple_of(AUDIT_EVERY) {
            self.audit();
        }
        Some(Infection {
            height: x,
            level: s,
            time: self.time,
        })
    }

    /// Recomputes every frontier rate from the infected set, counts a
    /// failure if the incremental bookkeeping drifted past [`AUDIT_TOL`],
    /// and resynchronizes.
    pub fn audit(&mut self) -> bool {
        let n = self.cols.len();
        let mut fresh = vec![[0.0f64; 2]; n];
        for i in 0..n {
            for s in 0..2 {
                if !self.cols[i][s].infected {
                    continue;
                }
                for &(dx, t, r) in self.graph.links(s) {
                    let j = i as i64 + dx;
                    if j >= 0 && (j as usize) < n && !self.cols[j as usize][t].infected {
                        fresh[j as usize][t] += r;
                    }
                }
            }
        }
        let total: f64 = fresh.iter().flatten().sum();
        let scale = total.abs().max(f64::MIN_POSITIVE);
        let mut ok = (self.total - total).abs() <= AUDIT_TOL * scale;
        for (col, f) in self.cols.iter_mut().zip(&fresh) {
            for s in 0..2 {
                if (col[s].rate - f[s]).abs() > AUDIT_TOL * scale {
                    ok = false;
                }
                col[s].rate = f[s];
            }
        }
        self.total = total;
        if !ok {
            self.audit_failures += 1;
        }
        ok
    }
}
