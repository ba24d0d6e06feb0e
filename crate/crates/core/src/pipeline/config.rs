use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::ForestConfig;
use crate::connectivity::{CrossPlotGrid, Method};
use crate::error::{Error, Result};
use crate::network::MetricKind;
use crate::preprocess::{BandpassSpec, WindowPlan};
use crate::signal_io::StageTag;

/// Rows fed to connectivity: electrode signals or harmonic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Raw,
    Sh,
    Hh,
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureKind::Raw => "raw",
            FeatureKind::Sh => "sh",
            FeatureKind::Hh => "hh",
        })
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(FeatureKind::Raw),
            "sh" => Ok(FeatureKind::Sh),
            "hh" => Ok(FeatureKind::Hh),
            _ => Err(Error::InvalidArgument(format!("unknown feature kind '{s}' (raw, sh, hh)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f32" => Ok(Precision::F32),
            "f64" => Ok(Precision::F64),
            _ => Err(Error::InvalidArgument(format!("unknown precision '{s}' (f32, f64)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Cohort manifest (`subject_id,group,file`).
    pub manifest: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub filter: BandpassSpec,
    pub window: WindowPlan,
    /// Markers longer than this many samples are truncated; 0 keeps the
    /// marker length.
    pub epoch_samples: usize,
    pub features: FeatureKind,
    pub order: usize,
    pub method: Method,
    pub grid: CrossPlotGrid,
    pub thresholds: Vec<f64>,
    pub metrics: Vec<MetricKind>,
    pub stages: Vec<StageTag>,
    /// Map CPTE NOM values v to 1 − v before thresholding.
    pub invert_cpte: bool,
    pub forest: ForestConfig,
    pub folds: usize,
    pub group_by_subject: bool,
    pub seed: u64,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    pub precision: Precision,
    pub write_features: bool,
    pub write_group_noms: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            manifest: None,
            output_dir: PathBuf::from("wmfc-out"),
            filter: BandpassSpec::default(),
            window: WindowPlan::default(),
            epoch_samples: 1000,
            features: FeatureKind::Raw,
            order: 6,
            method: Method::Pli,
            grid: CrossPlotGrid::default(),
            thresholds: parse_threshold_sweep("0.1:0.9:0.1").expect("valid sweep"),
            metrics: MetricKind::ALL.to_vec(),
            stages: StageTag::ALL.to_vec(),
            invert_cpte: false,
            forest: ForestConfig::default(),
            folds: 10,
            group_by_subject: false,
            seed: 0,
            workers: 0,
            precision: Precision::F64,
            write_features: true,
            write_group_noms: true,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        self.grid.validate()?;
        self.forest.validate()?;
        if self.thresholds.is_empty() || self.metrics.is_empty() || self.stages.is_empty() {
            return Err(Error::Config("thresholds, metrics and stages must be non-empty".into()));
        }
        if let Some(t) = self.thresholds.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::Config(format!("threshold {t} outside (0, 1)")));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!("need at least 2 folds, got {}", self.folds)));
        }
        if self.features != FeatureKind::Raw && self.order > 6 {
            return Err(Error::Config(format!("harmonic order {} exceeds 6", self.order)));
        }
        Ok(())
    }

    /// Number of (stage, threshold, metric) cells.
    pub fn cell_count(&self) -> usize {
        self.stages.len() * self.thresholds.len() * self.metrics.len()
    }
}

/// Parses `start:stop:step` into an inclusive list, each value rounded to
/// nine decimals so that 0.1:0.9:0.1 yields exactly 0.1, 0.2, …, 0.9.
pub fn parse_threshold_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let bad = || Error::InvalidArgument(format!("threshold sweep '{spec}' must be start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}
