//! Cross-plot transition entropy.
//!
//! Each sample pair (u_i, v_i) is placed on a polar grid over the cross plot
//! of the two series; the state is (radial band, angular sector). The entropy
//! (bits) of the consecutive-state transition distribution is the CPTE value.
//! Self-transitions count as transitions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CrossPlotGrid {
    /// `bands` radial bands scaled to the largest radius, `sectors` equal sectors.
    FixedCount { bands: usize, sectors: usize },
    /// Absolute radial ruler `dr` (signal units) and angular ruler in degrees.
    FixedRuler { dr: f64, dtheta_deg: f64 },
}

impl TryFrom<String> for CrossPlotGrid {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CrossPlotGrid> for String {
    fn from(g: CrossPlotGrid) -> String {
        g.to_string()
    }
}

impl Default for CrossPlotGrid {
    fn default() -> Self {
        CrossPlotGrid::FixedCount { bands: 5, sectors: 5 }
    }
}

impl CrossPlotGrid {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CrossPlotGrid::FixedCount { bands, sectors } if bands == 0 || sectors == 0 => {
                Err(Error::InvalidArgument("cross-plot grid needs >= 1 band and sector".into()))
            }
            CrossPlotGrid::FixedRuler { dr, dtheta_deg } if !(dr > 0.0 && dtheta_deg > 0.0) => {
                Err(Error::InvalidArgument("cross-plot rulers must be > 0".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn sectors(&self) -> usize {
        match *self {
            CrossPlotGrid::FixedCount { sectors, .. } => sectors,
            CrossPlotGrid::FixedRuler { dtheta_deg, .. } => (360.0 / dtheta_deg).ceil() as usize,
        }
    }
}

impl fmt::Display for CrossPlotGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossPlotGrid::FixedCount { bands, sectors } => write!(f, "count:{bands}x{sectors}"),
            CrossPlotGrid::FixedRuler { dr, dtheta_deg } => write!(f, "ruler:{dr},{dtheta_deg}"),
        }
    }
}

impl std::str::FromStr for CrossPlotGrid {
    type Err = Error;

    /// `count:5x5` or `ruler:2,10`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("grid `{s}` is not `count:NxM` or `ruler:DR,DTHETA`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let grid = match kind.trim() {
            "count" => {
                let (a, b) = rest.split_once('x').ok_or_else(bad)?;
                CrossPlotGrid::FixedCount {
                    bands: a.trim().parse().map_err(|_| bad())?,
                    sectors: b.trim().parse().map_err(|_| bad())?,
                }
            }
            "ruler" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                CrossPlotGrid::FixedRuler {
                    dr: a.trim().parse().map_err(|_| bad())?,
                    dtheta_deg: b.trim().parse().map_err(|_| bad())?,
                }
            }
            _ => return Err(bad()),
        };
        grid.validate()?;
        Ok(grid)
    }
}

/// Per-sample (radial band, angular sector) states, both 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSequence {
    pub states: Vec<(u32, u32)>,
    pub sectors: usize,
    /// `None` for the unbounded ruler grid.
    pub bands: Option<usize>,
}

impl StateSequence {
    /// Number of grid cells; for ruler grids, the bands actually reached.
    pub fn alphabet_size(&self) -> usize {
        let bands = self
            .bands
            .unwrap_or_else(|| self.states.iter().map(|s| s.0 as usize + 1).max().unwrap_or(1));
        bands * self.sectors
    }

    /// Letter-number name as on the cross plot, e.g. band 4 sector 0 → "E1".
    pub fn state_name(state: (u32, u32)) -> String {
        let letter = char::from_u32('A' as u32 + state.0).filter(|c| c.is_ascii_uppercase());
        match letter {
            Some(c) => format!("{c}{}", state.1 + 1),
            None => format!("R{}-{}", state.0, state.1 + 1),
        }
    }
}

#[inline]
fn angle_deg<T: Real>(u: T, v: T) -> T {
    let full = T::lit(360.0);
    let mut deg = v.atan2(u).to_degrees();
    if deg < T::zero() {
        deg += full;
    }
    if deg >= full {
        deg = T::zero();
    }
    deg
}

pub fn crossplot_states<T: Real>(u: &[T], v: &[T], grid: &CrossPlotGrid) -> Result<StateSequence> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("series lengths differ: {} vs {}", u.len(), v.len())));
    }
    if u.len() < 2 {
        return Err(Error::InvalidArgument("cross plot needs >= 2 samples".into()));
    }
    grid.validate()?;
    let radii: Vec<T> = u.iter().zip(v).map(|(&a, &b)| (a * a + b * b).sqrt()).collect();
    let full = T::lit(360.0);
    let states = match *grid {
        CrossPlotGrid::FixedCount { bands, sectors } => {
            let r_max = radii.iter().copied().fold(T::zero(), T::max);
            if r_max == T::zero() {
                vec![(0, 0); u.len()]
            } else {
                let (nb, ns) = (T::from_count(bands), T::from_count(sectors));
                radii
                    .iter()
                    .zip(u.iter().zip(v))
                    .map(|(&r, (&a, &b))| {
                        let band = (r * nb / r_max).floor().to_usize().unwrap_or(0).min(bands - 1);
                        let sector = (angle_deg(a, b) * ns / full).floor().to_usize().unwrap_or(0).min(sectors - 1);
                        (band as u32, sector as u32)
                    })
                    .collect()
            }
        }
        CrossPlotGrid::FixedRuler { dr, dtheta_deg } => {
            let (dr, dt) = (T::lit(dr), T::lit(dtheta_deg));
            let last = grid.sectors() - 1;
            radii
                .iter()
                .zip(u.iter().zip(v))
                .map(|(&r, (&a, &b))| {
                    let band = (r / dr).floor().to_u32().unwrap_or(u32::MAX);
                    let sector = (angle_deg(a, b) / dt).floor().to_usize().unwrap_or(0).min(last);
                    (band, sector as u32)
                })
                .collect()
        }
    };
    Ok(StateSequence {
        states,
        sectors: grid.sectors(),
        bands: match *grid {
            CrossPlotGrid::FixedCount { bands, .. } => Some(bands),
            CrossPlotGrid::FixedRuler { .. } => None,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDistribution {
    pub counts: BTreeMap<((u32, u32), (u32, u32)), usize>,
    pub total: usize,
}

impl TransitionDistribution {
    pub fn probability(&self, from: (u32, u32), to: (u32, u32)) -> f64 {
        self.counts.get(&(from, to)).map_or(0.0, |&c| c as f64 / self.total as f64)
    }
}

pub fn transition_distribution(states: &StateSequence) -> Result<TransitionDistribution> {
    if states.states.len() < 2 {
        return Err(Error::InvalidArgument("transition distribution needs >= 2 states".into()));
    }
    let mut counts = BTreeMap::new();
    for w in states.states.windows(2) {
        *counts.entry((w[0], w[1])).or_insert(0) += 1;
    }
    Ok(TransitionDistribution {
        counts,
        total: states.states.len() - 1,
    })
}

/// Shannon entropy (bits) of the transition distribution.
pub fn cpte<T: Real>(states: &StateSequence) -> Result<T> {
    if states.states.len() < 2 {
        return Err(Error::InvalidArgument("CPTE needs >= 2 states".into()));
    }
    Ok(transition_entropy(&states.states, &mut Vec::new()))
}

/// Entropy over consecutive-state codes; `scratch` is reused across calls.
pub(crate) fn transition_entropy<T: Real>(states: &[(u32, u32)], scratch: &mut Vec<u128>) -> T {
    scratch.clear();
    scratch.extend(states.windows(2).map(|w| {
        let a = ((w[0].0 as u64) << 32) | w[0].1 as u64;
        let b = ((w[1].0 as u64) << 32) | w[1].1 as u64;
        ((a as u128) << 64) | b as u128
    }));
    scratch.sort_unstable();
    let total = T::from_count(scratch.len());
    let mut entropy = T::zero();
    let mut i = 0;
    while i < scratch.len() {
        let mut j = i + 1;
        while j < scratch.len() && scratch[j] == scratch[i] {
            j += 1;
        }
        let p = T::from_count(j - i) / total;
        entropy -= p * p.log2();
        i = j;
    }
    entropy.max(T::zero())
}
