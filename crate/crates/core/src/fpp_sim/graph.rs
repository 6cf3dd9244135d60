//! Unit-cell description of a width-two translation-invariant graph.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::SimError;

/// Edge intensities of one unit cell; an absent key is an absent edge.
///
/// Vertices are (x, s) with height x ∈ ℤ and level s ∈ {0, 1}.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// (x,0)–(x,1)
    pub vertical: Option<f64>,
    /// (x,0)–(x+1,0)
    pub horiz0: Option<f64>,
    /// (x,1)–(x+1,1)
    pub horiz1: Option<f64>,
    /// (x,0)–(x+1,1)
    pub diag_up: Option<f64>,
    /// (x,1)–(x+1,0)
    pub diag_down: Option<f64>,
}

impl GraphSpec {
    /// Ladder with vertical intensity λ and horizontal intensity 1.
    pub fn ladder(lambda: f64) -> Self {
        Self {
            vertical: Some(lambda),
            horiz0: Some(1.0),
            horiz1: Some(1.0),
            ..Self::default()
        }
    }

    /// Ladder with both diagonals; vertical λ, everything else 1.
    pub fn diagonal_ladder(lambda: f64) -> Self {
        Self {
            diag_up: Some(1.0),
            diag_down: Some(1.0),
            ..Self::ladder(lambda)
        }
    }

    /// Ladder plus the single diagonal (x,0)–(x+1,1), all intensities 1:
    /// the graph with vertical, diagonal and two distinct horizontal edge
    /// types whose speed is (2 tan 1 − 1)/(2 tan 1 − 2).
    pub fn ladder_one_diagonal() -> Self {
        Self {
            diag_up: Some(1.0),
            ..Self::ladder(1.0)
        }
    }

    /// Every intensity multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = |v: Option<f64>| v.map(|x| x * factor);
        Self {
            vertical: f(self.vertical),
            horiz0: f(self.horiz0),
            horiz1: f(self.horiz1),
            diag_up: f(self.diag_up),
            diag_down: f(self.diag_down),
        }
    }

    fn named(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("vertical", self.vertical),
            ("horiz0", self.horiz0),
            ("horiz1", self.horiz1),
            ("diag_up", self.diag_up),
            ("diag_down", self.diag_down),
        ]
    }

    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("GraphSpec always serializes")
    }
}

/// Neighbour of a level-s vertex: height offset, level, intensity.
pub(crate) type Link = (i64, usize, f64);

/// A validated graph with per-level adjacency and the set of levels the
/// infection eventually reaches at every positive height.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedGraph {
    spec: GraphSpec,
    links: [Vec<Link>; 2],
    alive: [bool; 2],
}

/// Half-width of the strip searched for reachability.
const REACH_WIDTH: i64 = 12;
/// Column where the reachable levels are read off.
const ALIVE_COLUMN: i64 = 4;

pub fn validate(spec: &GraphSpec) -> Result<CheckedGraph, SimError> {
    for (edge, v) in spec.named() {
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                return Err(SimError::NonPositiveIntensity { edge, value: x });
            }
        }
    }
    let mut links: [Vec<Link>; 2] = [Vec::new(), Vec::new()];
    if let Some(r) = spec.vertical {
        links[0].push((0, 1, r));
        links[1].push((0, 0, r));
    }
    if let Some(r) = spec.horiz0 {
        links[0].push((1, 0, r));
        links[0].push((-1, 0, r));
    }
    if let Some(r) = spec.horiz1 {
        links[1].push((1, 1, r));
        links[1].push((-1, 1, r));
    }
    if let Some(r) = spec.diag_up {
        links[0].push((1, 1, r));
        links[1].push((-1, 0, r));
    }
    if let Some(r) = spec.diag_down {
        links[1].push((1, 0, r));
        links[0].push((-1, 1, r));
    }

    // breadth-first search on a finite strip from both start vertices
    let width = (2 * REACH_WIDTH + 1) as usize;
    let idx = |x: i64, s: usize| ((x + REACH_WIDTH) as usize) * 2 + s;
    let mut seen = vec![false; width * 2];
    let mut queue = VecDeque::from([(0i64, 0usize), (0, 1)]);
    seen[idx(0, 0)] = true;
    seen[idx(0, 1)] = true;
    while let Some((x, s)) = queue.pop_front() {
        for &(dx, t, _) in &links[s] {
            let y = x + dx;
            if y.abs() <= REACH_WIDTH && !seen[idx(y, t)] {
                seen[idx(y, t)] = true;
                queue.push_back((y, t));
            }
        }
    }
    if !seen[idx(REACH_WIDTH, 0)] && !seen[idx(REACH_WIDTH, 1)] {
        return Err(SimError::NoPercolation);
    }
    let alive = [seen[idx(ALIVE_COLUMN, 0)], seen[idx(ALIVE_COLUMN, 1)]];
    Ok(CheckedGraph {
        spec: *spec,
        links,
        alive,
    })
}

impl CheckedGraph {
    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    /// Whether level s is infected at every height eventually.
    pub fn alive(&self, s: usize) -> bool {
        self.alive[s]
    }

    pub(crate) fn links(&self, s: usize) -> &[Link] {
        &self.links[s]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_accepted() {
        let g = validate(&GraphSpec::ladder(0.5)).unwrap();
        assert!(g.alive(0) && g.alive(1));
    }

    #[test]
    fn vertical_only_rejected() {
        let spec = GraphSpec {
            vertical: Some(1.0),
            ..GraphSpec::default()
        };
        assert!(matches!(validate(&spec), Err(SimError::NoPercolation)));
        assert!(matches!(validate(&GraphSpec::default()), Err(SimError::NoPercolation)));
    }

    #[test]
    fn single_diagonal_stalls() {
        // (0,0) reaches (1,1), whose only edge leads back; (0,1) only reaches
        // (−1,0)
        let spec = GraphSpec {
            diag_up: Some(1.0),
            ..GraphSpec::default()
        };
        assert!(matches!(validate(&spec), Err(SimError::NoPercolation)));
    }

    #[test]
    fn both_diagonals_zigzag() {
        let spec = GraphSpec {
            diag_up: Some(1.0),
            diag_down: Some(1.0),
            ..GraphSpec::default()
        };
        let g = validate(&spec).unwrap();
        assert!(g.alive(0) && g.alive(1));
    }

    #[test]
    fn one_lane_leaves_other_level_dead() {
        let spec = GraphSpec {
            horiz0: Some(1.0),
            ..GraphSpec::default()
        };
        let g = validate(&spec).unwrap();
        assert!(g.alive(0) && !g.alive(1));
    }

    #[test]
    fn intensities_must_be_positive() {
        let spec = GraphSpec {
            horiz0: Some(0.0),
            ..GraphSpec::ladder(1.0)
        };
        assert!(matches!(
            validate(&spec),
            Err(SimError::NonPositiveIntensity { edge: "horiz0", .. })
        ));
        let spec = GraphSpec {
            vertical: Some(f64::NAN),
            ..GraphSpec::ladder(1.0)
        };
        assert!(validate(&spec).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let spec = GraphSpec::diagonal_ladder(2.5);
        let back = GraphSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(back, spec);
        let parsed = GraphSpec::from_toml("vertical = 1.0\nhoriz0 = 2\n").unwrap();
        assert_eq!(parsed.horiz0, Some(2.0));
        assert_eq!(parsed.horiz1, None);
        assert!(GraphSpec::from_toml("sideways = 1.0").is_err());
    }
}
