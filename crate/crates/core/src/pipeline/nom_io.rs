use crate::connectivity::{Method, Provenance};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::Nom;
use crate::scalar::Real;
use crate::signal_io::{parse_csv_matrix, render_csv, GroupLabel, Recording, StageTag};

/// Running element-wise sum of NOMs in f64; the mean is taken on finish.
#[derive(Debug, Clone)]
pub struct NomAccumulator {
    p: usize,
    sum: Vec<f64>,
    count: usize,
    method: Option<Method>,
}

impl NomAccumulator {
    pub fn new(p: usize) -> Self {
        NomAccumulator {
            p,
            sum: vec![0.0; p * p],
            count: 0,
            method: None,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn add<T: Real>(&mut self, nom: &Nom<T>) -> Result<()> {
        if nom.size() != self.p || nom.values.cols() != self.p {
            return Err(Error::Dimension(format!(
                "NOM of size {} added to accumulator of size {}",
                nom.size(),
                self.p
            )));
        }
        for (s, v) in self.sum.iter_mut().zip(nom.values.as_slice()) {
            *s += v.as_f64();
        }
        self.count += 1;
        self.method.get_or_insert(nom.method);
        Ok(())
    }

    pub fn mean<T: Real>(&self, provenance: Option<Provenance>) -> Result<Nom<T>> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("no NOMs to average".into()));
        }
        let n = self.count as f64;
        Ok(Nom {
            values: Matrix::from_vec(self.p, self.p, self.sum.iter().map(|s| T::lit(s / n)).collect())?,
            method: self.method.unwrap_or(Method::Pli),
            provenance,
        })
    }
}

/// Element-wise mean of the NOMs tagged with `group` and `stage`. Untagged
/// NOMs are included; NOMs tagged with another cell are skipped.
pub fn aggregate_group_nom<T: Real>(noms: &[Nom<T>], group: GroupLabel, stage: StageTag) -> Result<Nom<T>> {
    let chosen: Vec<&Nom<T>> = noms
        .iter()
        .filter(|n| n.provenance.is_none_or(|p| p.group == group && p.stage == stage))
        .collect();
    let first = chosen
        .first()
        .ok_or_else(|| Error::InvalidArgument(format!("no NOMs for {group} {stage}")))?;
    let mut acc = NomAccumulator::new(first.size());
    for n in chosen {
        acc.add(n)?;
    }
    acc.mean(Some(Provenance { stage, group, offset: 0 }))
}

/// Square matrix as CSV: a header of labels, then one line per row.
pub fn nom_to_csv<T: Real>(values: &Matrix<T>, labels: &[String]) -> Result<String> {
    if values.rows() != values.cols() || labels.len() != values.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix with {} labels",
            values.rows(),
            values.cols(),
            labels.len()
        )));
    }
    Ok(render_csv(&Recording::new(1.0, labels.to_vec(), values.transpose())?))
}

pub fn nom_from_csv(text: &str) -> Result<(Vec<String>, Matrix<f64>)> {
    let rec = parse_csv_matrix::<f64>(text, 1.0)?;
    if rec.channels() != rec.samples() {
        return Err(Error::Dimension(format!(
            "matrix CSV has {} columns and {} rows",
            rec.channels(),
            rec.samples()
        )));
    }
    Ok((rec.label_names(), rec.data().transpose()))
}
