use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::derive_seed;
use crate::signal_io::GroupLabel;

use super::{train_forest, FeatureTable, ForestConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation of the fold accuracies.
    pub std_accuracy: f64,
    /// `confusion[true][predicted]`, classes in the order AD, MCI, HC.
    pub confusion: [[usize; 3]; 3],
    pub seed: u64,
}

impl CvReport {
    pub fn summary(&self) -> String {
        let folds: Vec<String> = self.fold_accuracies.iter().map(|a| format!("{a:.4}")).collect();
        let mut out = format!(
            "mean accuracy {:.4} (std {:.4}) over {} folds, seed {}\nfolds: {}\nconfusion (rows true, cols predicted; AD MCI HC):\n",
            self.mean_accuracy,
            self.std_accuracy,
            self.fold_accuracies.len(),
            self.seed,
            folds.join(" ")
        );
        for (label, row) in GroupLabel::ALL.iter().zip(&self.confusion) {
            out.push_str(&format!("{:>4} {:>6} {:>6} {:>6}\n", label.as_str(), row[0], row[1], row[2]));
        }
        out
    }
}

fn rows_by_class(labels: &[GroupLabel]) -> BTreeMap<GroupLabel, Vec<usize>> {
    let mut by_class: BTreeMap<GroupLabel, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    by_class
}

/// Test-row indices of each fold. Per class, rows are shuffled and dealt
/// round-robin into `k` folds.
pub fn stratified_folds(labels: &[GroupLabel], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need k >= 2 folds, got {k}")));
    }
    if labels.is_empty() {
        return Err(Error::Classify("cannot cross-validate an empty table".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    for (class, mut rows) in rows_by_class(labels) {
        if rows.len() < k {
            return Err(Error::Classify(format!(
                "class {class} has {} rows, fewer than {k} folds",
                rows.len()
            )));
        }
        rows.shuffle(&mut rng);
        for (j, r) in rows.into_iter().enumerate() {
            folds[j % k].push(r);
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Like [`stratified_folds`] but deals whole subjects, so no subject
/// contributes rows to both sides of a split.
pub fn subject_folds(labels: &[GroupLabel], subjects: &[u32], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need k >= 2 folds, got {k}")));
    }
    if labels.is_empty() {
        return Err(Error::Classify("cannot cross-validate an empty table".into()));
    }
    let mut owner: BTreeMap<u32, GroupLabel> = BTreeMap::new();
    for (&s, &l) in subjects.iter().zip(labels) {
        if *owner.entry(s).or_insert(l) != l {
            return Err(Error::Classify(format!("subject {s} carries more than one label")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of: BTreeMap<u32, usize> = BTreeMap::new();
    for class in GroupLabel::ALL {
        let mut ids: Vec<u32> = owner.iter().filter(|(_, &l)| l == class).map(|(&s, _)| s).collect();
        if ids.is_empty() {
            continue;
        }
        if ids.len() < k {
            return Err(Error::Classify(format!(
                "class {class} has {} subjects, fewer than {k} folds",
                ids.len()
            )));
        }
        ids.shuffle(&mut rng);
        for (j, s) in ids.into_iter().enumerate() {
            fold_of.insert(s, j % k);
        }
    }
    let mut folds = vec![Vec::new(); k];
    for (i, s) in subjects.iter().enumerate() {
        folds[fold_of[s]].push(i);
    }
    Ok(folds)
}

/// k-fold cross-validated random forest. Fold `i` trains with a seed derived
/// from `cfg.seed` and `i`.
pub fn cross_validate<T: Real>(table: &FeatureTable<T>, k: usize, cfg: &ForestConfig, group_by_subject: bool) -> Result<CvReport> {
    let folds = if group_by_subject {
        let subjects = table
            .subjects
            .as_ref()
            .ok_or_else(|| Error::Classify("subject ids are required for subject-level folds".into()))?;
        subject_folds(&table.labels, subjects, k, cfg.seed)?
    } else {
        stratified_folds(&table.labels, k, cfg.seed)?
    };
    let results: Vec<(f64, [[usize; 3]; 3])> = folds
        .par_iter()
        .enumerate()
        .map(|(i, test)| {
            let mut in_test = vec![false; table.len()];
            test.iter().for_each(|&r| in_test[r] = true);
            let train: Vec<usize> = (0..table.len()).filter(|&r| !in_test[r]).collect();
            let fold_cfg = ForestConfig {
                seed: derive_seed(cfg.seed, i as u64),
                ..*cfg
            };
            let forest = train_forest(&table.subset(&train), &fold_cfg)?;
            let mut confusion = [[0usize; 3]; 3];
            let mut correct = 0usize;
            for &r in test {
                let pred = forest.predict(table.rows.row(r))?;
                let truth = table.labels[r];
                confusion[truth.index()][pred.index()] += 1;
                correct += usize::from(pred == truth);
            }
            Ok((correct as f64 / test.len().max(1) as f64, confusion))
        })
        .collect::<Result<_>>()?;
    let fold_accuracies: Vec<f64> = results.iter().map(|r| r.0).collect();
    let mean = fold_accuracies.iter().sum::<f64>() / k as f64;
    let var = fold_accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let mut confusion = [[0usize; 3]; 3];
    for (_, c) in &results {
        for (dst, src) in confusion.iter_mut().zip(c) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
    }
    Ok(CvReport {
        fold_accuracies,
        mean_accuracy: mean,
        std_accuracy: var.sqrt(),
        confusion,
        seed: cfg.seed,
    })
}
