use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

fn gray(v: f64) -> u8 {
    if v.is_nan() {
        0
    } else {
        (255.0 * v.clamp(0.0, 1.0)).round() as u8
    }
}

fn check_square<T: Real>(m: &Matrix<T>) -> Result<usize> {
    if m.rows() != m.cols() || m.rows() == 0 {
        return Err(Error::Dimension(format!(
            "heatmap needs a non-empty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows())
}

/// Binary PGM (P5, maxval 255), one pixel per entry; v maps to
/// round(255·v) after clamping to [0, 1].
pub fn heatmap_pgm<T: Real>(m: &Matrix<T>) -> Result<Vec<u8>> {
    let p = check_square(m)?;
    let mut out = format!("P5\n{p} {p}\n255\n").into_bytes();
    out.extend(m.as_slice().iter().map(|v| gray(v.as_f64())));
    Ok(out)
}

/// Returns (width, height, pixels) of a P5 image with maxval 255.
pub fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse {
                offset: pos,
                msg: "truncated PGM header".into(),
            });
        }
        fields.push((start, std::str::from_utf8(&bytes[start..pos]).unwrap_or("").to_string()));
    }
    if fields[0].1 != "P5" {
        return Err(Error::Parse {
            offset: 0,
            msg: "not a binary PGM (P5)".into(),
        });
    }
    let num = |k: usize| -> Result<usize> {
        fields[k].1.parse().map_err(|_| Error::Parse {
            offset: fields[k].0,
            msg: format!("bad header value `{}`", fields[k].1),
        })
    };
    let (w, h, maxval) = (num(1)?, num(2)?, num(3)?);
    if maxval != 255 {
        return Err(Error::Parse {
            offset: fields[3].0,
            msg: format!("maxval {maxval} is not 255"),
        });
    }
    let data = &bytes[(pos + 1).min(bytes.len())..];
    if data.len() != w * h {
        return Err(Error::Parse {
            offset: pos + 1,
            msg: format!("expected {} pixel bytes, found {}", w * h, data.len()),
        });
    }
    Ok((w, h, data.to_vec()))
}

/// SVG heatmap with row and column labels.
pub fn heatmap_svg<T: Real>(m: &Matrix<T>, labels: &[String]) -> Result<String> {
    let p = check_square(m)?;
    if labels.len() != p {
        return Err(Error::Dimension(format!("{} labels for a {p}x{p} heatmap", labels.len())));
    }
    const CELL: usize = 10;
    const MARGIN: usize = 40;
    let size = MARGIN + p * CELL;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    for i in 0..p {
        for j in 0..p {
            let g = gray(m[(i, j)].as_f64());
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="rgb({g},{g},{g})"/>"#,
                MARGIN + j * CELL,
                MARGIN + i * CELL
            );
        }
    }
    for (k, label) in labels.iter().enumerate() {
        let label = escape(label);
        let c = MARGIN + k * CELL + CELL / 2;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="7" text-anchor="end" dominant-baseline="middle">{label}</text>"#,
            MARGIN - 2,
            c
        );
        let _ = writeln!(
            s,
            r#"<text x="{c}" y="{}" font-size="7" text-anchor="start" dominant-baseline="middle" transform="rotate(-90 {c} {})">{label}</text>"#,
            MARGIN - 2,
            MARGIN - 2
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes `<path>.pgm` and `<path>.svg` and returns both paths.
pub fn render_heatmap<T: Real>(m: &Matrix<T>, labels: &[String], path: &Path) -> Result<(PathBuf, PathBuf)> {
    let pgm = path.with_extension("pgm");
    let svg = path.with_extension("svg");
    std::fs::write(&pgm, heatmap_pgm(m)?).map_err(|e| Error::io(&pgm, e))?;
    std::fs::write(&svg, heatmap_svg(m, labels)?).map_err(|e| Error::io(&svg, e))?;
    Ok((pgm, svg))
}
