use std::collections::HashSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Bundled 63-channel extended 10-10 layout (colatitude-from-vertex convention).
pub const BUNDLED_MONTAGE: &str = include_str!("../../assets/montage_63_10-10.csv");

const DEFAULT_HEAD_RADIUS: f64 = 0.10;

/// Electrode position on the head sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    /// Colatitude from the vertex, radians in [0, π].
    pub elevation: f64,
    /// Counterclockwise from the nasion axis, radians in [0, 2π).
    pub azimuth: f64,
    /// Meters.
    pub radius: f64,
}

/// Electrode layout keyed by channel label, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Montage {
    entries: Vec<(String, Position)>,
    head_radius: f64,
}

impl Montage {
    pub fn new(entries: Vec<(String, Position)>, head_radius: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("montage has no entries".into()));
        }
        if !(head_radius > 0.0) {
            return Err(Error::Range(format!("head radius {head_radius} must be > 0")));
        }
        let mut seen = HashSet::new();
        for (label, p) in &entries {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            if !(0.0..=PI).contains(&p.elevation) {
                return Err(Error::Range(format!("{label}: elevation {} outside [0, π]", p.elevation)));
            }
            if !(0.0..2.0 * PI).contains(&p.azimuth) {
                return Err(Error::Range(format!("{label}: azimuth {} outside [0, 2π)", p.azimuth)));
            }
            if !(p.radius > 0.0) {
                return Err(Error::Range(format!("{label}: radius must be > 0")));
            }
        }
        Ok(Montage { entries, head_radius })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn head_radius(&self) -> f64 {
        self.head_radius
    }

    pub fn entries(&self) -> &[(String, Position)] {
        &self.entries
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn position(&self, label: &str) -> Option<Position> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, p)| *p)
    }

    /// Reorders the montage to follow `labels` (e.g. recording channel order).
    pub fn select(&self, labels: &[String]) -> Result<Montage> {
        let entries = labels
            .iter()
            .map(|l| {
                self.position(l)
                    .map(|p| (l.clone(), p))
                    .ok_or_else(|| Error::InvalidArgument(format!("channel `{l}` missing from montage")))
            })
            .collect::<Result<Vec<_>>>()?;
        Montage::new(entries, self.head_radius)
    }
}

/// Parses `label,elevation_deg,azimuth_deg` lines. `#` starts a comment; a
/// leading `label,...` header line is optional.
pub fn load_montage(text: &str) -> Result<Montage> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if entries.is_empty() && fields.first().is_some_and(|f| f.eq_ignore_ascii_case("label")) {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Csv {
                row: lineno + 1,
                col: None,
                msg: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let num = |c: usize| -> Result<f64> {
            fields[c].parse().map_err(|_| Error::Csv {
                row: lineno + 1,
                col: Some(c + 1),
                msg: format!("`{}` is not a number", fields[c]),
            })
        };
        let (elev, azim) = (num(1)?, num(2)?);
        if !(0.0..=180.0).contains(&elev) {
            return Err(Error::Range(format!("line {}: elevation {elev}° outside [0°, 180°]", lineno + 1)));
        }
        entries.push((
            fields[0].to_string(),
            Position {
                elevation: elev.to_radians(),
                azimuth: azim.rem_euclid(360.0).to_radians() % (2.0 * PI),
                radius: DEFAULT_HEAD_RADIUS,
            },
        ));
    }
    Montage::new(entries, DEFAULT_HEAD_RADIUS)
}

pub fn bundled_montage() -> Montage {
    load_montage(BUNDLED_MONTAGE).expect("bundled montage is valid")
}
