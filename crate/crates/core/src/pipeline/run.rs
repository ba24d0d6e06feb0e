use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{cross_validate, FeatureTable, ForestConfig};
use crate::connectivity::{windowed_connectivity, Method};
use crate::error::{Error, Result};
use crate::harmonics::{build_head_basis, build_sh_basis, decompose, from_flat, HarmonicBasis, SamplingWeights};
use crate::matrix::Matrix;
use crate::network::{binarize, invert_nom, metric_vector, minmax_normalize, MetricKind, Nom};
use crate::preprocess::{average_reference, design_bandpass, filter_recording};
use crate::scalar::Real;
use crate::seed::derive_seed;
use crate::signal_io::{bundled_montage, extract_epochs, Epoch, GroupLabel, Marker, MarkerList, StageTag};

use super::config::{FeatureKind, PipelineConfig, Precision};
use super::nom_io::{nom_to_csv, NomAccumulator};
use super::render::render_heatmap;
use super::source::{ManifestSource, Subject, SubjectSource};

/// One attempted grid cell. Failed cells carry no accuracy and an
/// `error: …` status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub stage: StageTag,
    pub threshold: f64,
    pub metric: MetricKind,
    pub mean_accuracy: Option<f64>,
    pub std_accuracy: Option<f64>,
    pub rows: usize,
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Csv {
                row: 0,
                col: None,
                msg: e.to_string(),
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv {
            row: 0,
            col: None,
            msg: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows = reader
            .deserialize()
            .enumerate()
            .map(|(i, r)| {
                r.map_err(|e| Error::Csv {
                    row: i + 2,
                    col: None,
                    msg: e.to_string(),
                })
            })
            .collect::<Result<Vec<SweepRow>>>()?;
        Ok(SweepResult { rows })
    }

    pub fn get(&self, stage: StageTag, threshold: f64, metric: MetricKind) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.stage == stage && r.metric == metric && (r.threshold - threshold).abs() < 1e-9)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub sweep: SweepResult,
    pub sweep_path: PathBuf,
    pub feature_files: Vec<PathBuf>,
    pub nom_files: Vec<PathBuf>,
}

/// Runs the configured sweep over the subjects of `cfg.manifest`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let manifest = cfg.manifest.as_ref().ok_or_else(|| Error::Config("no manifest given".into()))?;
    let source = ManifestSource::open(manifest)?;
    run_with_source(cfg, &source)
}

/// Runs the sweep over any subject source inside a pool of `cfg.workers`
/// threads. Results do not depend on the worker count.
pub fn run_with_source<S: SubjectSource>(cfg: &PipelineConfig, source: &S) -> Result<PipelineOutput> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cfg.precision {
        Precision::F64 => run_typed::<f64, S>(cfg, source),
        Precision::F32 => run_typed::<f32, S>(cfg, source),
    })
}

struct Grid<'a> {
    cfg: &'a PipelineConfig,
}

impl Grid<'_> {
    fn per_stage(&self) -> usize {
        self.cfg.thresholds.len() * self.cfg.metrics.len()
    }

    fn stage_slot(&self, stage: StageTag) -> Option<usize> {
        self.cfg.stages.iter().position(|&s| s == stage)
    }

    fn cells(&self) -> impl Iterator<Item = (usize, StageTag, f64, MetricKind)> + '_ {
        let cfg = self.cfg;
        cfg.stages
            .iter()
            .flat_map(move |&s| {
                cfg.thresholds
                    .iter()
                    .flat_map(move |&t| cfg.metrics.iter().map(move |&m| (s, t, m)))
            })
            .enumerate()
            .map(|(i, (s, t, m))| (i, s, t, m))
    }
}

/// Seed of a cell, keyed by its identity so it is the same whichever grid
/// the cell belongs to.
fn cell_seed(master: u64, stage: StageTag, threshold: f64, metric: MetricKind) -> u64 {
    let metric_index = MetricKind::ALL.iter().position(|&m| m == metric).unwrap_or(0) as u64;
    let key = ((stage.index() as u64) << 48) | (metric_index << 40) | (threshold * 1e9).round() as u64;
    derive_seed(master, key)
}

#[derive(Default)]
struct CellBuf<T> {
    data: Vec<T>,
    labels: Vec<GroupLabel>,
    stages: Vec<StageTag>,
    subjects: Vec<u32>,
}

struct WindowOut<T> {
    nom: Option<Nom<T>>,
    /// One vector per (threshold, metric), threshold-major.
    vectors: Vec<Vec<T>>,
}

struct Projector<T> {
    basis: HarmonicBasis<T>,
    weights: SamplingWeights<T>,
}

fn node_labels<T: Real>(channel_labels: Vec<String>, projector: &Option<Projector<T>>) -> Vec<String> {
    match projector {
        None => channel_labels,
        Some(p) => (0..p.basis.functions())
            .map(|k| {
                let (n, m) = from_flat(k);
                format!("Y{n}_{m}")
            })
            .collect(),
    }
}

fn projector<T: Real>(cfg: &PipelineConfig, labels: &[String]) -> Result<Option<Projector<T>>> {
    if cfg.features == FeatureKind::Raw {
        return Ok(None);
    }
    let montage = bundled_montage().select(labels)?;
    let weights = SamplingWeights::identity(montage.len());
    let basis = match cfg.features {
        FeatureKind::Sh => build_sh_basis(&montage, cfg.order)?,
        _ => build_head_basis(&montage, cfg.order, &weights)?,
    };
    Ok(Some(Projector { basis, weights }))
}

fn process_epoch<T: Real>(cfg: &PipelineConfig, epoch: &Epoch<T>, projector: &Option<Projector<T>>) -> Result<Vec<WindowOut<T>>> {
    let referenced = average_reference(epoch)?;
    let rows = match projector {
        None => referenced.data,
        Some(p) => decompose(&p.basis, &p.weights, &referenced.data)?.coeffs,
    };
    let matrices = windowed_connectivity(&rows, &cfg.window, cfg.method, &cfg.grid, epoch.stage, epoch.group)?;
    let mut out = Vec::with_capacity(matrices.len());
    for c in &matrices {
        let mut nom = minmax_normalize(c)?;
        if cfg.invert_cpte && cfg.method == Method::Cpte {
            nom = invert_nom(&nom);
        }
        let mut vectors = Vec::with_capacity(cfg.thresholds.len() * cfg.metrics.len());
        for &t in &cfg.thresholds {
            let adj = binarize(&nom, t)?;
            for &m in &cfg.metrics {
                vectors.push(metric_vector::<T>(&adj, m));
            }
        }
        out.push(WindowOut {
            nom: cfg.write_group_noms.then_some(nom),
            vectors,
        });
    }
    Ok(out)
}

struct SubjectOut<T> {
    labels: Vec<String>,
    epochs: Vec<(StageTag, Vec<WindowOut<T>>)>,
}

fn process_subject<T: Real>(cfg: &PipelineConfig, subject: Subject<T>) -> Result<SubjectOut<T>> {
    let Subject {
        group,
        mut recording,
        markers,
        ..
    } = subject;
    let filt = design_bandpass(&cfg.filter, recording.sample_rate())?;
    filter_recording(&filt, &mut recording)?;

    let (kept, origin): (Vec<Marker>, Vec<usize>) = markers
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, m)| cfg.stages.contains(&m.stage))
        .map(|(i, m)| (*m, i))
        .unzip();
    let fixed = (cfg.epoch_samples > 0).then_some(cfg.epoch_samples);
    let epochs = extract_epochs(&recording, &MarkerList::new(kept)?, group, fixed).map_err(|e| match e {
        Error::MarkerBounds { row, msg } => Error::MarkerBounds { row: origin[row], msg },
        other => other,
    })?;
    let channel_labels = recording.label_names();
    drop(recording);

    let projector = projector::<T>(cfg, &channel_labels)?;
    let labels = node_labels(channel_labels, &projector);
    let windows = epochs
        .par_iter()
        .map(|ep| process_epoch(cfg, ep, &projector))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubjectOut {
        labels,
        epochs: epochs.iter().map(|e| e.stage).zip(windows).collect(),
    })
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

struct SweepWriter {
    path: PathBuf,
    writer: csv::Writer<std::fs::File>,
}

impl SweepWriter {
    fn create(path: PathBuf) -> Result<Self> {
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(SweepWriter {
            path,
            writer: csv::Writer::from_writer(file),
        })
    }

    fn push(&mut self, row: &SweepRow) -> Result<()> {
        self.writer.serialize(row).map_err(|e| Error::Csv {
            row: 0,
            col: None,
            msg: e.to_string(),
        })?;
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}

fn run_typed<T: Real, S: SubjectSource>(cfg: &PipelineConfig, source: &S) -> Result<PipelineOutput> {
    if source.is_empty() {
        return Err(Error::Config("no subjects to process".into()));
    }
    let grid = Grid { cfg };
    let out_dir = &cfg.output_dir;
    create_dir(out_dir)?;
    let sweep_path = out_dir.join("sweep.csv");
    let mut sweep_writer = SweepWriter::create(sweep_path.clone())?;

    let mut cells: Vec<CellBuf<T>> = (0..cfg.cell_count()).map(|_| CellBuf::default()).collect();
    let mut group_noms: BTreeMap<(GroupLabel, StageTag), NomAccumulator> = BTreeMap::new();
    let mut labels: Option<Vec<String>> = None;

    for index in 0..source.len() {
        let id = source.id(index).to_string();
        log::info!("subject {}/{}: {id} ({})", index + 1, source.len(), source.group(index));
        let subject = source.load::<T>(index).map_err(|e| e.context(format!("subject {id}")))?;
        let group = subject.group;
        let out = process_subject(cfg, subject).map_err(|e| e.context(format!("subject {id}")))?;
        match &labels {
            None => labels = Some(out.labels),
            Some(l) if l.len() != out.labels.len() => {
                return Err(Error::Dimension(format!(
                    "subject {id} yields {} nodes, earlier subjects {}",
                    out.labels.len(),
                    l.len()
                )))
            }
            Some(_) => {}
        }
        for (stage, windows) in out.epochs {
            let slot = grid.stage_slot(stage).expect("epochs are filtered by stage");
            for w in windows {
                if let Some(nom) = &w.nom {
                    let p = nom.size();
                    group_noms
                        .entry((group, stage))
                        .or_insert_with(|| NomAccumulator::new(p))
                        .add(nom)?;
                }
                for (k, v) in w.vectors.into_iter().enumerate() {
                    let cell = &mut cells[slot * grid.per_stage() + k];
                    cell.data.extend(v);
                    cell.labels.push(group);
                    cell.stages.push(stage);
                    cell.subjects.push(index as u32);
                }
            }
        }
    }
    let labels = labels.unwrap_or_default();
    let d = labels.len();

    let features_dir = out_dir.join("features");
    if cfg.write_features {
        create_dir(&features_dir)?;
    }
    let mut feature_files = Vec::new();
    let mut sweep = SweepResult::default();
    for (i, stage, threshold, metric) in grid.cells().collect::<Vec<_>>() {
        let buf = std::mem::take(&mut cells[i]);
        let n = buf.labels.len();
        let file = features_dir.join(format!("{stage}_t{threshold}_{metric}.csv"));
        let outcome = (|| -> Result<(f64, f64)> {
            let rows = Matrix::from_vec(n, d, buf.data)?;
            let table = FeatureTable::new(rows, buf.labels, buf.stages, Some(metric))?.with_subjects(buf.subjects)?;
            if cfg.write_features {
                write_file(&file, table.to_csv())?;
            }
            let forest = ForestConfig {
                seed: cell_seed(cfg.seed, stage, threshold, metric),
                ..cfg.forest
            };
            let report = cross_validate(&table, cfg.folds, &forest, cfg.group_by_subject)?;
            Ok((report.mean_accuracy, report.std_accuracy))
        })();
        if cfg.write_features && file.exists() {
            feature_files.push(file);
        }
        let row = match outcome {
            Ok((mean, std)) => {
                log::info!("{stage} t={threshold} {metric}: accuracy {mean:.4} +/- {std:.4} over {n} windows");
                SweepRow {
                    stage,
                    threshold,
                    metric,
                    mean_accuracy: Some(mean),
                    std_accuracy: Some(std),
                    rows: n,
                    status: "ok".into(),
                }
            }
            Err(e) => {
                log::warn!("{stage} t={threshold} {metric}: {e}");
                SweepRow {
                    stage,
                    threshold,
                    metric,
                    mean_accuracy: None,
                    std_accuracy: None,
                    rows: n,
                    status: format!("error: {e}"),
                }
            }
        };
        sweep_writer.push(&row)?;
        sweep.rows.push(row);
    }

    let mut nom_files = Vec::new();
    if cfg.write_group_noms && !group_noms.is_empty() {
        let nom_dir = out_dir.join("noms");
        create_dir(&nom_dir)?;
        for ((group, stage), acc) in &group_noms {
            let mean = acc.mean::<f64>(None)?;
            let stem = nom_dir.join(format!("{group}_{stage}"));
            let csv_path = stem.with_extension("csv");
            write_file(&csv_path, nom_to_csv(&mean.values, &labels)?)?;
            let (pgm, svg) = render_heatmap(&mean.values, &labels, &stem)?;
            nom_files.extend([csv_path, pgm, svg]);
        }
    }
    let snapshot = out_dir.join("config.toml");
    let mut file = std::fs::File::create(&snapshot).map_err(|e| Error::io(&snapshot, e))?;
    file.write_all(cfg.to_toml()?.as_bytes()).map_err(|e| Error::io(&snapshot, e))?;

    Ok(PipelineOutput {
        sweep,
        sweep_path,
        feature_files,
        nom_files,
    })
}
