use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::{MetricKind, NodeMetrics};
use crate::scalar::Real;
use crate::signal_io::{GroupLabel, StageTag};

/// One row per window; columns are node-level metric values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable<T> {
    pub rows: Matrix<T>,
    pub labels: Vec<GroupLabel>,
    pub stages: Vec<StageTag>,
    pub feature_names: Vec<String>,
    pub metric: Option<MetricKind>,
    /// Source subject per row, when known. Not part of the CSV form.
    pub subjects: Option<Vec<u32>>,
}

/// Node metrics of one window with its tags.
#[derive(Debug, Clone)]
pub struct WindowMetrics<T> {
    pub group: GroupLabel,
    pub stage: StageTag,
    pub subject: Option<u32>,
    pub metrics: NodeMetrics<T>,
}

pub(crate) fn default_names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("f_{i:03}")).collect()
}

impl<T: Real> FeatureTable<T> {
    pub fn new(rows: Matrix<T>, labels: Vec<GroupLabel>, stages: Vec<StageTag>, metric: Option<MetricKind>) -> Result<Self> {
        let names = default_names(rows.cols());
        let table = FeatureTable {
            rows,
            labels,
            stages,
            feature_names: names,
            metric,
            subjects: None,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn with_subjects(mut self, subjects: Vec<u32>) -> Result<Self> {
        if subjects.len() != self.len() {
            return Err(Error::Dimension(format!("{} subject ids for {} rows", subjects.len(), self.len())));
        }
        self.subjects = Some(subjects);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let n = self.rows.rows();
        if self.labels.len() != n || self.stages.len() != n {
            return Err(Error::Dimension(format!(
                "{n} rows but {} labels and {} stages",
                self.labels.len(),
                self.stages.len()
            )));
        }
        if self.feature_names.len() != self.rows.cols() {
            return Err(Error::Dimension("feature name count differs from column count".into()));
        }
        if let Some(pos) = self.rows.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::Range(format!(
                "non-finite feature at row {}, column {}",
                pos / self.rows.cols().max(1),
                pos % self.rows.cols().max(1)
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> usize {
        self.rows.cols()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> FeatureTable<T> {
        let d = self.dims();
        let mut data = Vec::with_capacity(indices.len() * d);
        for &i in indices {
            data.extend_from_slice(self.rows.row(i));
        }
        FeatureTable {
            rows: Matrix::from_vec(indices.len(), d, data).expect("sized"),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            stages: indices.iter().map(|&i| self.stages[i]).collect(),
            feature_names: self.feature_names.clone(),
            metric: self.metric,
            subjects: self.subjects.as_ref().map(|s| indices.iter().map(|&i| s[i]).collect()),
        }
    }

    /// CSV with header `label,stage,<feature names>`. Values use the
    /// shortest representation that parses back to the same number.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,stage");
        for name in &self.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, row) in self.rows.row_iter().enumerate() {
            out.push_str(self.labels[i].as_str());
            out.push(',');
            out.push_str(self.stages[i].as_str());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| Error::Csv {
                row: 1,
                col: None,
                msg: e.to_string(),
            })?
            .clone();
        if header.len() < 2 || &header[0] != "label" || &header[1] != "stage" {
            return Err(Error::Csv {
                row: 1,
                col: None,
                msg: "header must start with label,stage".into(),
            });
        }
        let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
        let d = names.len();
        let (mut labels, mut stages, mut data) = (Vec::new(), Vec::new(), Vec::new());
        for (r, record) in reader.records().enumerate() {
            let line = r + 2;
            let record = record.map_err(|e| Error::Csv {
                row: line,
                col: None,
                msg: e.to_string(),
            })?;
            if record.len() != d + 2 {
                return Err(Error::Csv {
                    row: line,
                    col: None,
                    msg: format!("expected {} fields, found {}", d + 2, record.len()),
                });
            }
            labels.push(record[0].parse::<GroupLabel>().map_err(|e| Error::Csv {
                row: line,
                col: Some(1),
                msg: e.to_string(),
            })?);
            stages.push(record[1].parse::<StageTag>().map_err(|e| Error::Csv {
                row: line,
                col: Some(2),
                msg: e.to_string(),
            })?);
            for (c, field) in record.iter().enumerate().skip(2) {
                let v: f64 = field.trim().parse().map_err(|_| Error::Csv {
                    row: line,
                    col: Some(c + 1),
                    msg: format!("'{field}' is not a number"),
                })?;
                data.push(T::lit(v));
            }
        }
        let n = labels.len();
        let table = FeatureTable {
            rows: Matrix::from_vec(n, d, data)?,
            labels,
            stages,
            feature_names: names,
            metric: None,
            subjects: None,
        };
        table.validate()?;
        Ok(table)
    }
}

/// Stacks the chosen metric of every window into a table.
pub fn assemble_features<T: Real>(windows: &[WindowMetrics<T>], metric: MetricKind) -> Result<FeatureTable<T>> {
    let d = windows.first().map_or(0, |w| w.metrics.degree.len());
    let mut data = Vec::with_capacity(windows.len() * d);
    for (i, w) in windows.iter().enumerate() {
        let row = w.metrics.get(metric);
        if row.len() != d {
            return Err(Error::Dimension(format!("window {i} has {} nodes, expected {d}", row.len())));
        }
        data.extend(row);
    }
    let mut table = FeatureTable::new(
        Matrix::from_vec(windows.len(), d, data)?,
        windows.iter().map(|w| w.group).collect(),
        windows.iter().map(|w| w.stage).collect(),
        Some(metric),
    )?;
    if windows.iter().all(|w| w.subject.is_some()) && !windows.is_empty() {
        table.subjects = Some(windows.iter().map(|w| w.subject.unwrap_or(0)).collect());
    }
    Ok(table)
}
