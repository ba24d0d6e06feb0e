use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

use super::{GroupLabel, MarkerList, Recording, StageTag};

/// Stage- and group-tagged slice of a recording, channels × W.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch<T> {
    pub stage: StageTag,
    pub group: GroupLabel,
    pub data: Matrix<T>,
    pub sample_rate: f64,
    /// Onset in the source recording, in samples.
    pub onset: usize,
}

impl<T: Real> Epoch<T> {
    pub fn channels(&self) -> usize {
        self.data.rows()
    }

    pub fn len(&self) -> usize {
        self.data.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.cols() == 0
    }
}

/// Copies one epoch per marker. With `fixed_len`, markers longer than it
/// are truncated to their first `fixed_len` samples.
pub fn extract_epochs<T: Real>(
    rec: &Recording<T>,
    markers: &MarkerList,
    group: GroupLabel,
    fixed_len: Option<usize>,
) -> Result<Vec<Epoch<T>>> {
    let n = rec.samples();
    let mut out = Vec::with_capacity(markers.len());
    for (row, m) in markers.rows().iter().enumerate() {
        let len = fixed_len.map_or(m.epoch_len, |f| m.epoch_len.min(f));
        let end = m
            .onset_sample
            .checked_add(len)
            .filter(|&e| e <= n)
            .ok_or_else(|| Error::MarkerBounds {
                row,
                msg: format!(
                    "window [{}, {}) but recording has {n} samples",
                    m.onset_sample,
                    m.onset_sample.saturating_add(len)
                ),
            })?;
        out.push(Epoch {
            stage: m.stage,
            group,
            data: rec.data().col_slice(m.onset_sample, end - m.onset_sample),
            sample_rate: rec.sample_rate(),
            onset: m.onset_sample,
        });
    }
    Ok(out)
}
