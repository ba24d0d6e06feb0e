use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

use super::Recording;

/// Parses a sample-per-row CSV (first row: channel labels) into a
/// channels × samples recording. Row numbers in errors are 1-based file lines.
pub fn parse_csv_matrix<T: Real>(text: &str, sample_rate: f64) -> Result<Recording<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::Csv {
            row: 1,
            col: None,
            msg: e.to_string(),
        })?,
        None => {
            return Err(Error::Csv {
                row: 1,
                col: None,
                msg: "missing header row".into(),
            })
        }
    };
    let labels: Vec<String> = header.iter().map(str::to_string).collect();
    let width = labels.len();

    let mut columns: Vec<Vec<T>> = vec![Vec::new(); width];
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Csv {
            row,
            col: None,
            msg: e.to_string(),
        })?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(Error::Csv {
                row,
                col: None,
                msg: format!("expected {width} fields, found {}", record.len()),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Csv {
                row,
                col: Some(c + 1),
                msg: format!("`{cell}` is not a number"),
            })?;
            columns[c].push(T::lit(v));
        }
    }
    let samples = columns.first().map_or(0, Vec::len);
    let data = Matrix::from_vec(width, samples, columns.into_iter().flatten().collect())?;
    Recording::new(sample_rate, labels, data)
}

/// Renders a recording in the sample-per-row layout with 17 significant
/// digits, which round-trips every finite `f64` exactly.
pub fn render_csv<T: Real>(rec: &Recording<T>) -> String {
    let mut out = rec.label_names().join(",");
    out.push('\n');
    let data = rec.data();
    for s in 0..rec.samples() {
        for ch in 0..rec.channels() {
            if ch > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", data[(ch, s)].as_f64()));
        }
        out.push('\n');
    }
    out
}
