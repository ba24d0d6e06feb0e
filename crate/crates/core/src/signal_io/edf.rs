//! European Data Format: 256-byte fixed header, 256 bytes per signal header
//! and contiguous records of 16-bit little-endian samples.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

use super::Recording;

const FIXED_HEADER: usize = 256;
const SIGNAL_HEADER: usize = 256;
const DIGITAL_MIN: i32 = -32767;
const DIGITAL_MAX: i32 = 32767;
const ANNOTATION_LABEL: &str = "EDF Annotations";

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Parse {
                offset: self.bytes.len(),
                msg: format!("needed {n} bytes at offset {}", self.pos),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn ascii(&mut self, n: usize, field: &str) -> Result<String> {
        let raw = self.take(n)?;
        if !raw.is_ascii() {
            return Err(Error::Field {
                field: field.into(),
                msg: "non-ASCII bytes".into(),
            });
        }
        Ok(String::from_utf8_lossy(raw).trim().to_string())
    }
}

fn parse_num<N: std::str::FromStr>(text: &str, field: &str) -> Result<N> {
    text.trim().parse::<N>().map_err(|_| Error::Field {
        field: field.into(),
        msg: format!("`{text}` is not numeric"),
    })
}

struct SignalHeader {
    label: String,
    phys_min: f64,
    phys_max: f64,
    dig_min: f64,
    dig_max: f64,
    samples_per_record: usize,
}

/// Parses an EDF byte stream. Annotation signals are skipped; all remaining
/// signals must share one samples-per-record count.
pub fn parse_edf<T: Real>(bytes: &[u8]) -> Result<Recording<T>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let version = cur.ascii(8, "version")?;
    if version != "0" {
        return Err(Error::Field {
            field: "version".into(),
            msg: format!("expected `0`, found `{version}`"),
        });
    }
    cur.take(80 + 80 + 8 + 8)?; // patient, recording, start date, start time
    let header_bytes: usize = parse_num(&cur.ascii(8, "header bytes")?, "header bytes")?;
    cur.take(44)?;
    let n_records: i64 = parse_num(&cur.ascii(8, "number of data records")?, "number of data records")?;
    let duration: f64 = parse_num(&cur.ascii(8, "duration of a data record")?, "duration of a data record")?;
    let ns: usize = parse_num(&cur.ascii(4, "number of signals")?, "number of signals")?;

    if header_bytes != FIXED_HEADER + ns * SIGNAL_HEADER {
        return Err(Error::Field {
            field: "header bytes".into(),
            msg: format!("{header_bytes} inconsistent with {ns} signals"),
        });
    }

    let mut read_column = |width: usize, field: &str| -> Result<Vec<String>> { (0..ns).map(|_| cur.ascii(width, field)).collect() };
    let labels = read_column(16, "label")?;
    read_column(80, "transducer type")?;
    read_column(8, "physical dimension")?;
    let phys_min = read_column(8, "physical minimum")?;
    let phys_max = read_column(8, "physical maximum")?;
    let dig_min = read_column(8, "digital minimum")?;
    let dig_max = read_column(8, "digital maximum")?;
    read_column(80, "prefiltering")?;
    let spr = read_column(8, "samples per record")?;
    read_column(32, "reserved")?;

    let mut signals = Vec::with_capacity(ns);
    for i in 0..ns {
        signals.push(SignalHeader {
            label: labels[i].clone(),
            phys_min: parse_num(&phys_min[i], "physical minimum")?,
            phys_max: parse_num(&phys_max[i], "physical maximum")?,
            dig_min: parse_num(&dig_min[i], "digital minimum")?,
            dig_max: parse_num(&dig_max[i], "digital maximum")?,
            samples_per_record: parse_num(&spr[i], "samples per record")?,
        });
    }

    let record_len: usize = signals.iter().map(|s| s.samples_per_record * 2).sum();
    let data_start = cur.pos;
    let n_records = if n_records < 0 {
        // -1: unknown during recording; infer from the file size
        (bytes.len() - data_start).checked_div(record_len).unwrap_or(0)
    } else {
        n_records as usize
    };

    let data_signals: Vec<(usize, &SignalHeader)> = signals.iter().enumerate().filter(|(_, s)| s.label != ANNOTATION_LABEL).collect();
    let spr = match data_signals.first() {
        Some((_, s)) => s.samples_per_record,
        None => 0,
    };
    if let Some((i, s)) = data_signals.iter().find(|(_, s)| s.samples_per_record != spr) {
        return Err(Error::Field {
            field: "samples per record".into(),
            msg: format!(
                "signal {i} has {} samples per record, expected {spr} (mixed rates unsupported)",
                s.samples_per_record
            ),
        });
    }
    for &(i, s) in &data_signals {
        if s.dig_max == s.dig_min {
            return Err(Error::Calibration {
                signal: i,
                msg: "digital minimum equals digital maximum".into(),
            });
        }
        if s.phys_max == s.phys_min {
            return Err(Error::Calibration {
                signal: i,
                msg: "physical minimum equals physical maximum".into(),
            });
        }
    }
    let sample_rate = if duration > 0.0 {
        spr as f64 / duration
    } else {
        return Err(Error::Field {
            field: "duration of a data record".into(),
            msg: format!("{duration} must be > 0"),
        });
    };

    let total = n_records * spr;
    let mut data = Matrix::from_elem(data_signals.len(), total, T::zero());
    let gains: Vec<(f64, f64)> = data_signals
        .iter()
        .map(|(_, s)| {
            let gain = (s.phys_max - s.phys_min) / (s.dig_max - s.dig_min);
            (gain, s.phys_min - gain * s.dig_min)
        })
        .collect();

    for rec in 0..n_records {
        let mut out_row = 0;
        for s in &signals {
            let raw = cur.take(s.samples_per_record * 2)?;
            if s.label == ANNOTATION_LABEL {
                continue;
            }
            let (gain, offset) = gains[out_row];
            let row = data.row_mut(out_row);
            for (k, pair) in raw.chunks_exact(2).enumerate() {
                let d = i16::from_le_bytes([pair[0], pair[1]]) as f64;
                row[rec * spr + k] = T::lit(gain * d + offset);
            }
            out_row += 1;
        }
    }

    let names = data_signals.iter().map(|(_, s)| s.label.clone()).collect();
    Recording::new(sample_rate, names, data)
}

#[derive(Clone, Copy)]
enum Round {
    Down,
    Up,
}

/// Formats `x` into at most 8 ASCII characters, rounding outward in `dir`.
fn format_bounded(x: f64, dir: Round) -> Result<String> {
    for places in (0..=7usize).rev() {
        let scale = 10f64.powi(places as i32);
        let snapped = match dir {
            Round::Down => (x * scale).floor() / scale,
            Round::Up => (x * scale).ceil() / scale,
        };
        let mut s = format!("{snapped:.places$}");
        if s == "-0" || s.chars().all(|c| matches!(c, '-' | '0' | '.')) {
            s = s.trim_start_matches('-').to_string();
        }
        if s.len() <= 8 {
            let back: f64 = s.parse().expect("formatted number parses");
            let ok = match dir {
                Round::Down => back <= x,
                Round::Up => back >= x,
            };
            if ok {
                return Ok(s);
            }
        }
    }
    Err(Error::Range(format!("value {x} is not representable in an 8-character EDF field")))
}

fn shortest_fit(x: f64) -> Option<String> {
    let s = format!("{x}");
    if s.len() <= 8 {
        return Some(s);
    }
    (0..=7usize).rev().map(|p| format!("{x:.p$}")).find(|s| s.len() <= 8)
}

fn divisors_desc(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.into_iter().chain(small.into_iter().rev()).collect()
}

/// Picks (records, samples per record, duration text) such that the sample
/// rate survives the 8-character duration field exactly when possible.
fn record_layout(n: usize, fs: f64) -> (usize, usize, String) {
    let exact = |spr: usize| -> Option<String> {
        let text = shortest_fit(spr as f64 / fs)?;
        let back: f64 = text.parse().ok()?;
        (back > 0.0 && spr as f64 / back == fs).then_some(text)
    };
    if fs.fract() == 0.0 && fs <= 1e8 {
        let spr = fs as usize;
        if n.is_multiple_of(spr) {
            if let Some(text) = exact(spr) {
                return (n / spr, spr, text);
            }
        }
    }
    if n == 0 {
        return (0, 1, shortest_fit(1.0 / fs).unwrap_or_else(|| "1".into()));
    }
    for spr in divisors_desc(n) {
        if let Some(text) = exact(spr) {
            return (n / spr, spr, text);
        }
    }
    let text = shortest_fit(n as f64 / fs).unwrap_or_else(|| "1".into());
    (1, n, text)
}

fn pad(out: &mut Vec<u8>, text: &str, width: usize) {
    let bytes = text.as_bytes();
    let n = bytes.len().min(width);
    out.extend_from_slice(&bytes[..n]);
    out.extend(std::iter::repeat_n(b' ', width - n));
}

/// Serializes a recording as EDF. Each channel is autoscaled to its own
/// physical range over the symmetric digital range ±32767.
pub fn write_edf<T: Real>(rec: &Recording<T>) -> Result<Vec<u8>> {
    let ns = rec.channels();
    if ns == 0 {
        return Err(Error::InvalidArgument("EDF needs at least one channel".into()));
    }
    let n = rec.samples();
    let (n_records, spr, duration) = record_layout(n, rec.sample_rate());

    let mut ranges = Vec::with_capacity(ns);
    for (i, row) in rec.data().row_iter().enumerate() {
        let (mut lo, mut hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let v = v.as_f64();
            (lo.min(v), hi.max(v))
        });
        if !lo.is_finite() {
            lo = -1.0;
            hi = 1.0;
        } else if lo == hi {
            lo -= 1.0;
            hi += 1.0;
        }
        let lo_text = format_bounded(lo, Round::Down).map_err(|e| Error::Range(format!("signal {i}: {e}")))?;
        let mut hi_text = format_bounded(hi, Round::Up).map_err(|e| Error::Range(format!("signal {i}: {e}")))?;
        let lo_v: f64 = lo_text.parse().expect("formatted");
        let mut hi_v: f64 = hi_text.parse().expect("formatted");
        if hi_v <= lo_v {
            hi_text = format_bounded(lo_v + 1.0, Round::Up)?;
            hi_v = hi_text.parse().expect("formatted");
        }
        ranges.push((lo_text, hi_text, lo_v, hi_v));
    }

    let header_bytes = FIXED_HEADER + ns * SIGNAL_HEADER;
    let mut out = Vec::with_capacity(header_bytes + n * ns * 2);
    pad(&mut out, "0", 8);
    pad(&mut out, "X X X X", 80);
    pad(&mut out, "Startdate X X X X", 80);
    pad(&mut out, "01.01.00", 8);
    pad(&mut out, "00.00.00", 8);
    pad(&mut out, &header_bytes.to_string(), 8);
    pad(&mut out, "", 44);
    pad(&mut out, &n_records.to_string(), 8);
    pad(&mut out, &duration, 8);
    pad(&mut out, &ns.to_string(), 4);

    for l in rec.labels() {
        pad(&mut out, &l.name, 16);
    }
    for _ in 0..ns {
        pad(&mut out, "", 80);
    }
    for _ in 0..ns {
        pad(&mut out, "uV", 8);
    }
    for r in &ranges {
        pad(&mut out, &r.0, 8);
    }
    for r in &ranges {
        pad(&mut out, &r.1, 8);
    }
    for _ in 0..ns {
        pad(&mut out, &DIGITAL_MIN.to_string(), 8);
    }
    for _ in 0..ns {
        pad(&mut out, &DIGITAL_MAX.to_string(), 8);
    }
    for _ in 0..ns {
        pad(&mut out, "", 80);
    }
    for _ in 0..ns {
        pad(&mut out, &spr.to_string(), 8);
    }
    for _ in 0..ns {
        pad(&mut out, "", 32);
    }
    debug_assert_eq!(out.len(), header_bytes);

    let dspan = (DIGITAL_MAX - DIGITAL_MIN) as f64;
    for r in 0..n_records {
        for (ch, row) in rec.data().row_iter().enumerate() {
            let (_, _, lo, hi) = ranges[ch];
            let scale = dspan / (hi - lo);
            for &v in &row[r * spr..(r + 1) * spr] {
                let d = (DIGITAL_MIN as f64 + (v.as_f64() - lo) * scale).round();
                let d = d.clamp(DIGITAL_MIN as f64, DIGITAL_MAX as f64) as i16;
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
    }
    Ok(out)
}
