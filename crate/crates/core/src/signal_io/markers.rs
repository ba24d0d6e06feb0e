use crate::error::{Error, Result};

use super::StageTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Marker {
    pub onset_sample: usize,
    pub stage: StageTag,
    pub epoch_len: usize,
}

/// Epoch markers sorted by onset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkerList {
    rows: Vec<Marker>,
}

impl MarkerList {
    pub fn new(rows: Vec<Marker>) -> Result<Self> {
        if let Some(i) = rows.iter().position(|m| m.epoch_len == 0) {
            return Err(Error::InvalidArgument(format!("marker row {i} has zero length")));
        }
        if let Some(i) = rows.windows(2).position(|w| w[1].onset_sample < w[0].onset_sample) {
            return Err(Error::InvalidArgument(format!("marker row {} is out of onset order", i + 1)));
        }
        Ok(MarkerList { rows })
    }

    pub fn rows(&self) -> &[Marker] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn count(&self, stage: StageTag) -> usize {
        self.rows.iter().filter(|m| m.stage == stage).count()
    }
}

/// Parses the `onset_sample,stage,epoch_len` marker CSV.
pub fn parse_markers(text: &str) -> Result<MarkerList> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Csv {
            row: 1,
            col: None,
            msg: e.to_string(),
        })?
        .clone();
    let expected = ["onset_sample", "stage", "epoch_len"];
    if header.len() != 3 || header.iter().zip(expected).any(|(h, e)| !h.eq_ignore_ascii_case(e)) {
        return Err(Error::Csv {
            row: 1,
            col: None,
            msg: format!("expected header `{}`", expected.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Csv {
            row,
            col: None,
            msg: e.to_string(),
        })?;
        if rec.len() != 3 {
            return Err(Error::Csv {
                row,
                col: None,
                msg: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let int = |c: usize| -> Result<usize> {
            rec[c].parse().map_err(|_| Error::Csv {
                row,
                col: Some(c + 1),
                msg: format!("`{}` is not a non-negative integer", &rec[c]),
            })
        };
        let stage = rec[1].parse::<StageTag>().map_err(|e| Error::Csv {
            row,
            col: Some(2),
            msg: e.to_string(),
        })?;
        rows.push(Marker {
            onset_sample: int(0)?,
            stage,
            epoch_len: int(2)?,
        });
    }
    MarkerList::new(rows)
}

pub fn render_markers(markers: &MarkerList) -> String {
    let mut out = String::from("onset_sample,stage,epoch_len\n");
    for m in markers.rows() {
        out.push_str(&format!("{},{},{}\n", m.onset_sample, m.stage, m.epoch_len));
    }
    out
}
