//! Recordings, montages, marker files and stage-tagged epochs.

mod csv_matrix;
mod edf;
mod epochs;
mod markers;
mod montage;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

pub use csv_matrix::{parse_csv_matrix, render_csv};
pub use edf::{parse_edf, write_edf};
pub use epochs::{extract_epochs, Epoch};
pub use markers::{parse_markers, render_markers, Marker, MarkerList};
pub use montage::{bundled_montage, load_montage, Montage, Position, BUNDLED_MONTAGE};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelLabel {
    pub name: String,
    pub index: usize,
}

/// Working-memory task stage an epoch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageTag {
    Encoding,
    RetroCue,
    Recall,
    Retrieval,
}

impl StageTag {
    pub const ALL: [StageTag; 4] = [StageTag::Encoding, StageTag::RetroCue, StageTag::Recall, StageTag::Retrieval];

    pub fn as_str(self) -> &'static str {
        match self {
            StageTag::Encoding => "encoding",
            StageTag::RetroCue => "retro-cue",
            StageTag::Recall => "recall",
            StageTag::Retrieval => "retrieval",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StageTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "encoding" => Ok(StageTag::Encoding),
            "retrocue" => Ok(StageTag::RetroCue),
            "recall" => Ok(StageTag::Recall),
            "retrieval" => Ok(StageTag::Retrieval),
            _ => Err(Error::InvalidArgument(format!("unknown stage `{s}`"))),
        }
    }
}

/// Diagnostic group. The declaration order is the class order used for
/// tie-breaking in classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupLabel {
    AD,
    MCI,
    HC,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 3] = [GroupLabel::AD, GroupLabel::MCI, GroupLabel::HC];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupLabel::AD => "AD",
            GroupLabel::MCI => "MCI",
            GroupLabel::HC => "HC",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AD" => Ok(GroupLabel::AD),
            "MCI" => Ok(GroupLabel::MCI),
            "HC" => Ok(GroupLabel::HC),
            _ => Err(Error::InvalidArgument(format!("unknown group `{s}`"))),
        }
    }
}

/// Multichannel recording, channels × samples, in microvolts.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording<T> {
    sample_rate: f64,
    data: Matrix<T>,
    labels: Vec<ChannelLabel>,
}

impl<T: Real> Recording<T> {
    pub fn new(sample_rate: f64, labels: Vec<String>, data: Matrix<T>) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::Range(format!("sample rate {sample_rate} must be > 0")));
        }
        if labels.len() != data.rows() {
            return Err(Error::Dimension(format!("{} labels for {} channels", labels.len(), data.rows())));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &labels {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateLabel(name.clone()));
            }
        }
        if let Some(pos) = data.as_slice().iter().position(|v| !v.is_finite()) {
            let cols = data.cols().max(1);
            return Err(Error::Range(format!(
                "non-finite sample at channel {}, sample {}",
                pos / cols,
                pos % cols
            )));
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(index, name)| ChannelLabel { name, index })
            .collect();
        Ok(Recording { sample_rate, data, labels })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn data(&self) -> &Matrix<T> {
        &self.data
    }

    /// Mutable access for in-place filtering. Callers keep samples finite.
    pub fn data_mut(&mut self) -> &mut Matrix<T> {
        &mut self.data
    }

    pub fn labels(&self) -> &[ChannelLabel] {
        &self.labels
    }

    pub fn label_names(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.name.clone()).collect()
    }

    pub fn channels(&self) -> usize {
        self.data.rows()
    }

    pub fn samples(&self) -> usize {
        self.data.cols()
    }
}
