use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal_io::{parse_edf, parse_markers, GroupLabel, MarkerList, Recording};
use crate::synth::{generate_subject, subject_plan, GroupProfile, Manifest, SynthConfig};

/// One participant's recording with its epoch markers.
#[derive(Debug, Clone)]
pub struct Subject<T> {
    pub id: String,
    pub group: GroupLabel,
    pub recording: Recording<T>,
    pub markers: MarkerList,
}

/// Indexed collection of subjects loaded on demand, one at a time.
pub trait SubjectSource: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn id(&self, index: usize) -> &str;

    fn group(&self, index: usize) -> GroupLabel;

    fn load<T: Real>(&self, index: usize) -> Result<Subject<T>>;
}

/// Subjects listed in a cohort manifest; paths resolve against the
/// manifest's directory.
#[derive(Debug, Clone)]
pub struct ManifestSource {
    root: PathBuf,
    manifest: Manifest,
}

impl ManifestSource {
    pub fn open(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest = Manifest::parse(&text).map_err(|e| e.context(path.display().to_string()))?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let source = ManifestSource { root, manifest };
        for e in &source.manifest.entries {
            for f in [source.root.join(&e.file), source.root.join(e.marker_file())] {
                if !f.is_file() {
                    return Err(Error::Config(format!("subject {}: missing file {}", e.subject_id, f.display())));
                }
            }
        }
        Ok(source)
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }
}

impl SubjectSource for ManifestSource {
    fn len(&self) -> usize {
        self.manifest.entries.len()
    }

    fn id(&self, index: usize) -> &str {
        &self.manifest.entries[index].subject_id
    }

    fn group(&self, index: usize) -> GroupLabel {
        self.manifest.entries[index].group
    }

    fn load<T: Real>(&self, index: usize) -> Result<Subject<T>> {
        let e = &self.manifest.entries[index];
        let edf = self.root.join(&e.file);
        let bytes = std::fs::read(&edf).map_err(|err| Error::io(&edf, err))?;
        let recording = parse_edf(&bytes).map_err(|err| err.context(edf.display().to_string()))?;
        let mk = self.root.join(e.marker_file());
        let text = std::fs::read_to_string(&mk).map_err(|err| Error::io(&mk, err))?;
        let markers = parse_markers(&text).map_err(|err| err.context(mk.display().to_string()))?;
        Ok(Subject {
            id: e.subject_id.clone(),
            group: e.group,
            recording,
            markers,
        })
    }
}

/// Cohort generated in memory with the same subject plan and seeds that
/// `generate_cohort` writes to disk, minus EDF quantization.
#[derive(Debug, Clone)]
pub struct SyntheticSource {
    profiles: BTreeMap<GroupLabel, GroupProfile>,
    cfg: SynthConfig,
    plan: Vec<(String, GroupLabel, u64)>,
}

impl SyntheticSource {
    pub fn new(profiles: BTreeMap<GroupLabel, GroupProfile>, cfg: SynthConfig) -> Result<Self> {
        cfg.validate()?;
        for g in GroupLabel::ALL {
            profiles
                .get(&g)
                .ok_or_else(|| Error::Config(format!("no profile for group {g}")))?
                .validate(cfg.fs)?;
        }
        let plan = subject_plan(&cfg);
        Ok(SyntheticSource { profiles, cfg, plan })
    }
}

impl SubjectSource for SyntheticSource {
    fn len(&self) -> usize {
        self.plan.len()
    }

    fn id(&self, index: usize) -> &str {
        &self.plan[index].0
    }

    fn group(&self, index: usize) -> GroupLabel {
        self.plan[index].1
    }

    fn load<T: Real>(&self, index: usize) -> Result<Subject<T>> {
        let (id, group, seed) = &self.plan[index];
        let (recording, markers) = generate_subject::<T>(&self.profiles[group], &self.cfg, *seed)?;
        Ok(Subject {
            id: id.clone(),
            group: *group,
            recording,
            markers,
        })
    }
}
