//! Seeded synthetic cohorts with tunable inter-channel phase coupling.
//!
//! Channel `i` is `κ·Σ_k a_ik·s_k(t − δ_ik) + (1 − κ)·η_i(t)`. The sources
//! `s_k` are unit cosines with a slow random-walk phase drift; the lag
//! `δ_ik` shifts only the carrier, so the phase offset between two channels
//! driven by the same source stays constant. `η_i` is 1/f noise. Lags and
//! mixing weights come from the cohort seed and are shared by every
//! subject; drift and noise come from the subject seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::seed::derive_seed;
use crate::signal_io::{bundled_montage, render_markers, write_edf, GroupLabel, Marker, MarkerList, Recording, StageTag};

/// Phase diffusion of the sources, radians per √s.
const PHASE_DIFFUSION: f64 = 0.3;
const GEOMETRY_STREAM: u64 = 0x6765_6f6d;
const DRIFT_STREAM: u64 = 0x6472_6966;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupProfile {
    pub kappa: f64,
    pub source_freqs: Vec<f64>,
    pub noise_sigma: f64,
    /// Largest carrier phase lag of any channel, radians.
    pub lag_spread: f64,
}

impl Default for GroupProfile {
    fn default() -> Self {
        GroupProfile {
            kappa: 0.5,
            source_freqs: vec![6.0, 10.0, 20.0],
            noise_sigma: 1.0,
            lag_spread: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl GroupProfile {
    pub fn with_kappa(kappa: f64) -> Self {
        GroupProfile {
            kappa,
            ..Default::default()
        }
    }

    pub fn validate(&self, fs: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::Config(format!("kappa {} outside [0, 1]", self.kappa)));
        }
        if self.source_freqs.is_empty() {
            return Err(Error::Config("at least one source frequency is required".into()));
        }
        if let Some(f) = self.source_freqs.iter().find(|&&f| !(f > 0.0 && f < fs / 2.0)) {
            return Err(Error::Config(format!("source frequency {f} must lie in (0, {})", fs / 2.0)));
        }
        if !(self.noise_sigma >= 0.0) || !(self.lag_spread >= 0.0) {
            return Err(Error::Config("noise_sigma and lag_spread must be >= 0".into()));
        }
        Ok(())
    }
}

/// HC 0.2, MCI 0.5, AD 0.8.
pub fn default_profiles() -> BTreeMap<GroupLabel, GroupProfile> {
    BTreeMap::from([
        (GroupLabel::AD, GroupProfile::with_kappa(0.8)),
        (GroupLabel::MCI, GroupProfile::with_kappa(0.5)),
        (GroupLabel::HC, GroupProfile::with_kappa(0.2)),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub channels: usize,
    pub fs: f64,
    /// Trials per stage in the order encoding, retro-cue, recall, retrieval.
    pub trials: [usize; 4],
    pub subjects_per_group: usize,
    pub seed: u64,
    /// Trial length in seconds.
    pub epoch_secs: f64,
    /// Silence between trials in seconds.
    pub gap_secs: f64,
    /// Multiplier on κ inside each stage's trials (same order as `trials`).
    pub stage_kappa_gain: [f64; 4],
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            channels: 63,
            fs: 1000.0,
            trials: [100, 50, 50, 200],
            subjects_per_group: 8,
            seed: 0,
            epoch_secs: 1.0,
            gap_secs: 0.25,
            stage_kappa_gain: [1.0; 4],
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 || self.subjects_per_group == 0 {
            return Err(Error::Config("channels and subjects_per_group must be positive".into()));
        }
        if !(self.fs > 0.0) {
            return Err(Error::Config(format!("sample rate {} must be > 0", self.fs)));
        }
        if self.trials.contains(&0) {
            return Err(Error::Config("every stage needs at least one trial".into()));
        }
        if self.epoch_len() == 0 || !(self.gap_secs >= 0.0) {
            return Err(Error::Config("epoch length must be positive and gap non-negative".into()));
        }
        if self.stage_kappa_gain.iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::Config("stage kappa gains must be >= 0".into()));
        }
        Ok(())
    }

    pub fn epoch_len(&self) -> usize {
        (self.epoch_secs * self.fs).round() as usize
    }

    fn gap_len(&self) -> usize {
        (self.gap_secs * self.fs).round() as usize
    }

    /// Marker schedule: a 1 s lead-in, then blocks that interleave the
    /// stages in working-memory order, and a 1 s tail. The block count is
    /// the gcd of the trial counts (50 blocks of 2/1/1/4 by default).
    pub fn schedule(&self) -> (MarkerList, usize) {
        let blocks = self.trials.iter().fold(0, |g, &t| gcd(g, t));
        let per_block: Vec<usize> = self.trials.iter().map(|t| t / blocks).collect();
        let (len, gap) = (self.epoch_len(), self.gap_len());
        let lead = self.fs.round() as usize;
        let mut t = lead;
        let mut rows = Vec::with_capacity(self.trials.iter().sum());
        for _ in 0..blocks {
            for (stage, &count) in StageTag::ALL.iter().zip(&per_block) {
                for _ in 0..count {
                    rows.push(Marker {
                        onset_sample: t,
                        stage: *stage,
                        epoch_len: len,
                    });
                    t += len + gap;
                }
            }
        }
        let total = t - gap + lead;
        (MarkerList::new(rows).expect("sorted schedule"), total)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Per-channel lags (as phase offsets, radians) and mixing weights shared by
/// the cohort.
struct Geometry {
    phase_lag: Vec<Vec<f64>>,
    weight: Vec<Vec<f64>>,
}

impl Geometry {
    fn new(cohort_seed: u64, channels: usize, sources: usize) -> Geometry {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cohort_seed, GEOMETRY_STREAM));
        let (mut phase_lag, mut weight) = (Vec::new(), Vec::new());
        for _ in 0..channels {
            let lags: Vec<f64> = (0..sources).map(|_| rng.gen_range(0.0..1.0)).collect();
            let raw: Vec<f64> = (0..sources).map(|_| rng.gen_range(0.2..1.0)).collect();
            // Σ a² = 2 gives the source mixture unit variance
            let norm = (raw.iter().map(|a| a * a).sum::<f64>() / 2.0).sqrt();
            phase_lag.push(lags);
            weight.push(raw.iter().map(|a| a / norm).collect());
        }
        Geometry { phase_lag, weight }
    }
}

/// Corner frequencies and gains of the one-pole filter bank whose summed
/// outputs approximate a 1/f spectrum.
fn pink_bank(fs: f64) -> Vec<(f64, f64)> {
    (0..)
        .map(|j| 0.125 * 2f64.powi(j))
        .take_while(|&fc| fc < 0.45 * fs)
        .map(|fc| ((-2.0 * std::f64::consts::PI * fc / fs).exp(), fc.powf(-0.5)))
        .collect()
}

/// 1/f noise with standard deviation `sigma`: one white input drives a bank
/// of one-pole lowpass filters at octave-spaced corners with gains ∝ fc^-1/2,
/// whose outputs are summed. The filter states start in their joint
/// stationary distribution.
pub fn pink_noise(len: usize, fs: f64, sigma: f64, seed: u64) -> Vec<f64> {
    let bank = pink_bank(fs);
    let m = bank.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // stationary covariance of the states for unit white input
    let cov = DMatrix::from_fn(m, m, |j, k| {
        let (aj, ak) = (bank[j].0, bank[k].0);
        (1.0 - aj) * (1.0 - ak) / (1.0 - aj * ak)
    });
    let gains = DVector::from_iterator(m, bank.iter().map(|&(_, g)| g));
    let var = gains.dot(&(&cov * &gains));
    let scale = if var > 0.0 { sigma / var.sqrt() } else { 0.0 };
    let mut state: Vec<f64> = match cov.clone().cholesky() {
        Some(ch) => {
            let z = DVector::from_iterator(m, (0..m).map(|_| StandardNormal.sample(&mut rng)));
            (ch.l() * z).iter().copied().collect()
        }
        None => vec![0.0; m],
    };
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let w: f64 = StandardNormal.sample(&mut rng);
        let mut acc = 0.0;
        for (s, &(a, g)) in state.iter_mut().zip(&bank) {
            *s = a * *s + (1.0 - a) * w;
            acc += g * *s;
        }
        out.push(acc * scale);
    }
    out
}

fn channel_labels(channels: usize) -> Vec<String> {
    let montage = bundled_montage();
    if channels <= montage.len() {
        montage.labels().take(channels).map(str::to_string).collect()
    } else {
        (0..channels).map(|i| format!("Ch{:03}", i + 1)).collect()
    }
}

/// One subject's recording and epoch markers.
pub fn generate_subject<T: Real>(profile: &GroupProfile, cfg: &SynthConfig, subject_seed: u64) -> Result<(Recording<T>, MarkerList)> {
    cfg.validate()?;
    profile.validate(cfg.fs)?;
    let (markers, n) = cfg.schedule();
    let sources = profile.source_freqs.len();
    let geometry = Geometry::new(cfg.seed, cfg.channels, sources);

    // κ per sample, with stage gains inside trials
    let mut kappa = vec![profile.kappa; n];
    for m in markers.rows() {
        let k = (profile.kappa * cfg.stage_kappa_gain[m.stage.index()]).clamp(0.0, 1.0);
        kappa[m.onset_sample..m.onset_sample + m.epoch_len].iter_mut().for_each(|v| *v = k);
    }

    let mut drift_rng = ChaCha8Rng::seed_from_u64(derive_seed(subject_seed, DRIFT_STREAM));
    let step = PHASE_DIFFUSION / cfg.fs.sqrt();
    let carriers: Vec<(Vec<f64>, Vec<f64>)> = profile
        .source_freqs
        .iter()
        .map(|&f| {
            let omega = 2.0 * std::f64::consts::PI * f / cfg.fs;
            let mut psi = drift_rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let (mut c, mut s) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for t in 0..n {
                let theta = omega * t as f64 + psi;
                c.push(theta.cos());
                s.push(theta.sin());
                let z: f64 = StandardNormal.sample(&mut drift_rng);
                psi += step * z;
            }
            (c, s)
        })
        .collect();

    let rows: Vec<Vec<T>> = (0..cfg.channels)
        .into_par_iter()
        .map(|i| {
            let noise = if profile.noise_sigma > 0.0 {
                pink_noise(n, cfg.fs, profile.noise_sigma, derive_seed(subject_seed, i as u64))
            } else {
                vec![0.0; n]
            };
            let terms: Vec<(f64, f64)> = (0..sources)
                .map(|k| {
                    let lag = geometry.phase_lag[i][k] * profile.lag_spread;
                    let a = geometry.weight[i][k];
                    (a * lag.cos(), a * lag.sin())
                })
                .collect();
            (0..n)
                .map(|t| {
                    // cos(θ − lag) = cos θ cos lag + sin θ sin lag
                    let mut src = 0.0;
                    for (k, &(ac, as_)) in terms.iter().enumerate() {
                        src += carriers[k].0[t] * ac + carriers[k].1[t] * as_;
                    }
                    T::lit(kappa[t] * src + (1.0 - kappa[t]) * noise[t])
                })
                .collect()
        })
        .collect();
    let mut data = Vec::with_capacity(cfg.channels * n);
    rows.into_iter().for_each(|r| data.extend(r));
    let rec = Recording::new(cfg.fs, channel_labels(cfg.channels), Matrix::from_vec(cfg.channels, n, data)?)?;
    Ok((rec, markers))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub group: GroupLabel,
    /// EDF path relative to the manifest.
    pub file: PathBuf,
}

impl ManifestEntry {
    /// Marker CSV stored next to the EDF as `<stem>.markers.csv`.
    pub fn marker_file(&self) -> PathBuf {
        self.file.with_extension("markers.csv")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut out = String::from("subject_id,group,file\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{}", e.subject_id, e.group, e.file.display());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Manifest> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::Csv {
            row: 1,
            col: None,
            msg: e.to_string(),
        })?;
        if header.iter().collect::<Vec<_>>() != ["subject_id", "group", "file"] {
            return Err(Error::Csv {
                row: 1,
                col: None,
                msg: "header must be subject_id,group,file".into(),
            });
        }
        let mut entries = Vec::new();
        for (r, record) in reader.records().enumerate() {
            let row = r + 2;
            let record = record.map_err(|e| Error::Csv {
                row,
                col: None,
                msg: e.to_string(),
            })?;
            let group = record[1].parse().map_err(|e: Error| Error::Csv {
                row,
                col: Some(2),
                msg: e.to_string(),
            })?;
            entries.push(ManifestEntry {
                subject_id: record[0].to_string(),
                group,
                file: PathBuf::from(&record[2]),
            });
        }
        Ok(Manifest { entries })
    }

    pub fn count(&self, group: GroupLabel) -> usize {
        self.entries.iter().filter(|e| e.group == group).count()
    }
}

/// Subject `s` (0-based over AD, MCI, HC blocks) gets seed `cfg.seed ^ s`.
pub fn subject_plan(cfg: &SynthConfig) -> Vec<(String, GroupLabel, u64)> {
    let per = cfg.subjects_per_group;
    (0..3 * per)
        .map(|s| (format!("sub-{:02}", s + 1), GroupLabel::ALL[s / per], cfg.seed ^ s as u64))
        .collect()
}

/// Writes one EDF and marker CSV per subject plus `manifest.csv` into `dir`.
/// Refuses to overwrite existing files.
pub fn generate_cohort(profiles: &BTreeMap<GroupLabel, GroupProfile>, cfg: &SynthConfig, dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    for g in GroupLabel::ALL {
        profiles
            .get(&g)
            .ok_or_else(|| Error::Config(format!("no profile for group {g}")))?
            .validate(cfg.fs)?;
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let plan = subject_plan(cfg);
    let manifest_path = dir.join("manifest.csv");
    let mut targets = vec![manifest_path.clone()];
    for (id, _, _) in &plan {
        targets.push(dir.join(format!("{id}.edf")));
        targets.push(dir.join(format!("{id}.markers.csv")));
    }
    if let Some(t) = targets.iter().find(|t| t.exists()) {
        return Err(Error::Io {
            path: t.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::AlreadyExists, "output file already exists"),
        });
    }
    let mut manifest = Manifest::default();
    for (id, group, seed) in plan {
        log::info!("generating {id} ({group})");
        let (rec, markers) = generate_subject::<f64>(&profiles[&group], cfg, seed)?;
        let file = PathBuf::from(format!("{id}.edf"));
        let entry = ManifestEntry {
            subject_id: id,
            group,
            file,
        };
        let edf_path = dir.join(&entry.file);
        std::fs::write(&edf_path, write_edf(&rec)?).map_err(|e| Error::io(&edf_path, e))?;
        let marker_path = dir.join(entry.marker_file());
        std::fs::write(&marker_path, render_markers(&markers)).map_err(|e| Error::io(&marker_path, e))?;
        manifest.entries.push(entry);
    }
    std::fs::write(&manifest_path, manifest.render()).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest)
}
