use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::preprocess::{window_offsets, WindowPlan};
use crate::scalar::Real;
use crate::signal_io::{GroupLabel, StageTag};

use super::cpte::{crossplot_states, transition_entropy, CrossPlotGrid};
use super::phase::{lag_sign_sum, PhaseExtractor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pli,
    Cpte,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pli => "pli",
            Method::Cpte => "cpte",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pli" => Ok(Method::Pli),
            "cpte" => Ok(Method::Cpte),
            _ => Err(Error::InvalidArgument(format!("unknown connectivity method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub stage: StageTag,
    pub group: GroupLabel,
    /// Window offset within its epoch, in samples.
    pub offset: usize,
}

/// Symmetric p × p synchronization matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix<T> {
    pub values: Matrix<T>,
    pub method: Method,
    pub provenance: Option<Provenance>,
}

impl<T: Real> ConnectivityMatrix<T> {
    pub fn size(&self) -> usize {
        self.values.rows()
    }
}

fn mirror<T: Real>(p: usize, mut entry: impl FnMut(usize, usize) -> T) -> Matrix<T> {
    let mut m = Matrix::from_elem(p, p, T::zero());
    for i in 0..p {
        for j in (i + 1)..p {
            let v = entry(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn pli_matrix<T: Real>(phases: &[Vec<T>], start: usize, width: usize) -> Matrix<T> {
    let n = T::from_count(width);
    mirror(phases.len(), |i, j| {
        let s = lag_sign_sum(&phases[i][start..start + width], &phases[j][start..start + width]);
        T::from_i64(s.abs()).expect("count") / n
    })
}

fn cpte_matrix<T: Real>(rows: &Matrix<T>, start: usize, width: usize, grid: &CrossPlotGrid) -> Result<Matrix<T>> {
    let p = rows.rows();
    let mut scratch = Vec::with_capacity(width);
    let mut m = Matrix::from_elem(p, p, T::zero());
    for i in 0..p {
        let u = &rows.row(i)[start..start + width];
        for j in (i + 1)..p {
            let v = &rows.row(j)[start..start + width];
            let states = crossplot_states(u, v, grid)?;
            let h = transition_entropy(&states.states, &mut scratch);
            m[(i, j)] = h;
            m[(j, i)] = h;
        }
    }
    Ok(m)
}

fn check_rows<T: Real>(rows: &Matrix<T>) -> Result<()> {
    if rows.rows() < 2 {
        return Err(Error::InvalidArgument(format!("connectivity needs >= 2 rows, got {}", rows.rows())));
    }
    Ok(())
}

fn row_phases<T: Real>(rows: &Matrix<T>) -> Result<Vec<Vec<T>>> {
    let extractor = PhaseExtractor::new(rows.cols())?;
    rows.row_iter().map(|r| extractor.phase(r).map(|p| p.phases)).collect()
}

/// Connectivity over all pairs of rows of a single window. For PLI, phases
/// are extracted from the window itself.
pub fn connectivity_matrix<T: Real>(rows: &Matrix<T>, method: Method, grid: &CrossPlotGrid) -> Result<ConnectivityMatrix<T>> {
    check_rows(rows)?;
    let values = match method {
        Method::Pli => pli_matrix(&row_phases(rows)?, 0, rows.cols()),
        Method::Cpte => cpte_matrix(rows, 0, rows.cols(), grid)?,
    };
    Ok(ConnectivityMatrix {
        values,
        method,
        provenance: None,
    })
}

/// One matrix per sliding window of an epoch. PLI phases come from the whole
/// epoch and are then windowed, which keeps Hilbert edge effects out of the
/// short windows.
pub fn windowed_connectivity<T: Real>(
    rows: &Matrix<T>,
    plan: &WindowPlan,
    method: Method,
    grid: &CrossPlotGrid,
    stage: StageTag,
    group: GroupLabel,
) -> Result<Vec<ConnectivityMatrix<T>>> {
    check_rows(rows)?;
    let offsets = window_offsets(rows.cols(), plan)?;
    let phases = match method {
        Method::Pli => Some(row_phases(rows)?),
        Method::Cpte => None,
    };
    offsets
        .into_iter()
        .map(|offset| {
            let values = match &phases {
                Some(ph) => pli_matrix(ph, offset, plan.width),
                None => cpte_matrix(rows, offset, plan.width, grid)?,
            };
            Ok(ConnectivityMatrix {
                values,
                method,
                provenance: Some(Provenance { stage, group, offset }),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::{analytic_phase, cpte, pli};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn tone(f: f64, lag: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| (2.0 * PI * f * k as f64 / 1000.0 - lag).cos()).collect()
    }

    #[test]
    fn identical_rows_zero() {
        let m = Matrix::from_rows(&[tone(10.0, 0.0, 500), tone(10.0, 0.0, 500)]).unwrap();
        let c = connectivity_matrix(&m, Method::Pli, &CrossPlotGrid::default()).unwrap();
        assert_eq!(c.values.as_slice(), &[0.0; 4]);
    }

    #[test]
    fn lagged_tones_and_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let noise: Vec<f64> = (0..1000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = Matrix::from_rows(&[tone(10.0, 0.0, 1000), tone(10.0, PI / 2.0, 1000), noise]).unwrap();
        let c = connectivity_matrix(&m, Method::Pli, &CrossPlotGrid::default()).unwrap();
        assert_eq!(c.values[(0, 1)], 1.0);
        assert_eq!(c.values[(1, 0)], 1.0);
        assert!(c.values[(0, 2)] < 1.0 && c.values[(1, 2)] < 1.0);
    }

    #[test]
    fn matches_scalar_routes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let m = Matrix::from_fn(5, 300, |_, _| rng.gen_range(-3.0..3.0));
        let grid = CrossPlotGrid::default();
        let c = connectivity_matrix(&m, Method::Cpte, &grid).unwrap();
        let l = connectivity_matrix(&m, Method::Pli, &grid).unwrap();
        let phases: Vec<_> = m.row_iter().map(|r| analytic_phase(r).unwrap()).collect();
        for i in 0..5 {
            assert_eq!(c.values[(i, i)], 0.0);
            for j in 0..5 {
                assert_eq!(c.values[(i, j)], c.values[(j, i)]);
                if i != j {
                    let s = crossplot_states(m.row(i), m.row(j), &grid).unwrap();
                    let want: f64 = cpte(&s).unwrap();
                    if i < j {
                        assert!((c.values[(i, j)] - want).abs() < 1e-12);
                    }
                    let want_pli = pli(&phases[i].phases, &phases[j].phases).unwrap();
                    assert_eq!(l.values[(i, j)], want_pli);
                }
            }
        }
    }

    #[test]
    fn too_few_rows() {
        let m = Matrix::from_elem(1, 100, 1.0f64);
        assert!(connectivity_matrix(&m, Method::Pli, &CrossPlotGrid::default()).is_err());
    }

    #[test]
    fn windowed_uses_epoch_phases() {
        let m = Matrix::from_rows(&[tone(10.0, 0.0, 1000), tone(10.0, PI / 4.0, 1000)]).unwrap();
        let w = windowed_connectivity(
            &m,
            &WindowPlan::default(),
            Method::Pli,
            &CrossPlotGrid::default(),
            StageTag::Recall,
            GroupLabel::HC,
        )
        .unwrap();
        assert_eq!(w.len(), 3);
        for (k, c) in w.iter().enumerate() {
            assert_eq!(c.values[(0, 1)], 1.0);
            assert_eq!(c.provenance.unwrap().offset, 250 * k);
        }
    }

    #[test]
    fn method_parse() {
        assert_eq!("PLI".parse::<Method>().unwrap(), Method::Pli);
        assert!("coh".parse::<Method>().is_err());
    }
}
