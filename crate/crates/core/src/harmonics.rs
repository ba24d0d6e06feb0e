//! Real spherical harmonics over an electrode montage, a head-adapted
//! orthonormal basis derived from them, and projection of multichannel data
//! onto either basis.
//!
//! Harmonics are real and orthonormal on the unit sphere. Associated
//! Legendre functions are evaluated without the Condon–Shortley phase.
//! Columns use the flat index `k = n² + n + m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::signal_io::Montage;

const CONDITION_WARN: f64 = 1e8;
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HarmonicKind {
    Spherical,
    Head,
}

/// Electrode-sampled basis functions, electrodes × (N+1)².
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicBasis<T> {
    pub kind: HarmonicKind,
    pub order: usize,
    pub design: Matrix<T>,
    /// Channel labels of the montage the basis was sampled on, in row order.
    pub labels: Vec<String>,
}

impl<T: Real> HarmonicBasis<T> {
    pub fn electrodes(&self) -> usize {
        self.design.rows()
    }

    pub fn functions(&self) -> usize {
        self.design.cols()
    }
}

/// Diagonal Γ of electrode sampling weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingWeights<T> {
    diag: Vec<T>,
}

impl<T: Real> SamplingWeights<T> {
    pub fn identity(n: usize) -> Self {
        SamplingWeights { diag: vec![T::one(); n] }
    }

    pub fn new(diag: Vec<T>) -> Result<Self> {
        if diag.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::Range("sampling weights must be positive".into()));
        }
        Ok(SamplingWeights { diag })
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// Coefficient streams, (N+1)² × T.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries<T> {
    pub coeffs: Matrix<T>,
    pub kind: HarmonicKind,
    pub order: usize,
}

pub fn basis_size(order: usize) -> usize {
    (order + 1) * (order + 1)
}

/// Flat column index of harmonic (n, m), `n² + n + m`.
pub fn flat_index(n: usize, m: i32) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= n);
    (n * n + n).wrapping_add_signed(m as isize)
}

/// Inverse of [`flat_index`].
pub fn from_flat(k: usize) -> (usize, i32) {
    let n = (k as f64).sqrt() as usize;
    // guard the float square root at perfect squares
    let n = if (n + 1) * (n + 1) <= k {
        n + 1
    } else if n * n > k {
        n - 1
    } else {
        n
    };
    (n, k as i32 - (n * n + n) as i32)
}

/// Orthonormal associated Legendre values `K(n, m)·P_n^m(cos θ)` for
/// `m` fixed and `n = m..=order`, by upward recurrence in `n`.
fn normalized_legendre_column<T: Real>(order: usize, m: usize, cos_t: T, sin_t: T) -> Vec<T> {
    let mut out = vec![T::zero(); order + 1];
    if m > order {
        return out;
    }
    let four_pi = T::lit(4.0) * T::PI();
    let mut pmm = (T::one() / four_pi).sqrt();
    for k in 1..=m {
        let kf = T::from_count(k);
        pmm = pmm * ((T::lit(2.0) * kf + T::one()) / (T::lit(2.0) * kf)).sqrt() * sin_t;
    }
    out[m] = pmm;
    if m == order {
        return out;
    }
    let mf = T::from_count(m);
    out[m + 1] = (T::lit(2.0) * mf + T::lit(3.0)).sqrt() * cos_t * pmm;
    for n in (m + 2)..=order {
        let nf = T::from_count(n);
        let n1 = nf - T::one();
        let a = ((T::lit(4.0) * nf * nf - T::one()) / (nf * nf - mf * mf)).sqrt();
        let b = ((n1 * n1 - mf * mf) / (T::lit(4.0) * n1 * n1 - T::one())).sqrt();
        out[n] = a * (cos_t * out[n - 1] - b * out[n - 2]);
    }
    out
}

/// Real orthonormal spherical harmonic of order `n`, degree `m` at
/// colatitude `theta` and azimuth `phi`.
pub fn eval_real_sh<T: Real>(n: usize, m: i32, theta: T, phi: T) -> Result<T> {
    if m.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(format!("|m| = {} exceeds n = {n}", m.abs())));
    }
    let am = m.unsigned_abs() as usize;
    let p = normalized_legendre_column(n, am, theta.cos(), theta.sin())[n];
    let sqrt2 = T::lit(2.0).sqrt();
    let mphi = T::from_count(am) * phi;
    Ok(match m {
        0 => p,
        m if m > 0 => sqrt2 * p * mphi.cos(),
        _ => sqrt2 * p * mphi.sin(),
    })
}

/// Values of all (N+1)² harmonics at one point, in flat-index order.
fn eval_all<T: Real>(order: usize, theta: T, phi: T) -> Vec<T> {
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let sqrt2 = T::lit(2.0).sqrt();
    let mut row = vec![T::zero(); basis_size(order)];
    for am in 0..=order {
        let col = normalized_legendre_column(order, am, cos_t, sin_t);
        let mphi = T::from_count(am) * phi;
        for n in am..=order {
            if am == 0 {
                row[flat_index(n, 0)] = col[n];
            } else {
                row[flat_index(n, am as i32)] = sqrt2 * col[n] * mphi.cos();
                row[flat_index(n, -(am as i32))] = sqrt2 * col[n] * mphi.sin();
            }
        }
    }
    row
}

fn check_order(montage: &Montage, order: usize) -> Result<()> {
    if basis_size(order) > montage.len() {
        return Err(Error::InvalidArgument(format!(
            "order {order} needs {} electrodes, montage has {}",
            basis_size(order),
            montage.len()
        )));
    }
    Ok(())
}

/// Spherical-harmonic design matrix sampled at the montage electrodes.
pub fn build_sh_basis<T: Real>(montage: &Montage, order: usize) -> Result<HarmonicBasis<T>> {
    check_order(montage, order)?;
    let rows: Vec<Vec<T>> = montage
        .entries()
        .iter()
        .map(|(_, p)| eval_all(order, T::lit(p.elevation), T::lit(p.azimuth)))
        .collect();
    Ok(HarmonicBasis {
        kind: HarmonicKind::Spherical,
        order,
        design: Matrix::from_rows(&rows)?,
        labels: montage.labels().map(str::to_string).collect(),
    })
}

/// Head-adapted basis: the spherical-harmonic columns orthonormalized in
/// flat-index order under the Γ-weighted inner product over the electrodes.
///
/// Modified Gram–Schmidt with one reorthogonalization pass, so column `k`
/// spans the same subspace as SH columns `0..=k` and BᵀΓB = I to rounding.
pub fn build_head_basis<T: Real>(montage: &Montage, order: usize, weights: &SamplingWeights<T>) -> Result<HarmonicBasis<T>> {
    let sh = build_sh_basis::<T>(montage, order)?;
    if weights.len() != montage.len() {
        return Err(Error::Dimension(format!(
            "{} sampling weights for {} electrodes",
            weights.len(),
            montage.len()
        )));
    }
    let w = weights.diag();
    let dot = |a: &[T], b: &[T]| -> T { a.iter().zip(b).zip(w).map(|((&x, &y), &g)| g * x * y).sum() };

    let cols = sh.functions();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(cols);
    let mut r_diag = Vec::with_capacity(cols);
    let columns = sh.design.transpose();
    for k in 0..cols {
        let mut v = columns.row(k).to_vec();
        let original = dot(&v, &v).sqrt();
        for _pass in 0..2 {
            for u in &q {
                let proj = dot(u, &v);
                for (vi, &ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > T::lit(RANK_TOL) * original) {
            return Err(Error::RankDeficient { column: k });
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        r_diag.push(norm.as_f64());
        q.push(v);
    }
    let (lo, hi) = r_diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let condition = hi / lo;
    if condition > CONDITION_WARN {
        log::warn!("harmonic design matrix is near-degenerate (condition estimate {condition:.3e})");
    }
    Ok(HarmonicBasis {
        kind: HarmonicKind::Head,
        order,
        design: Matrix::from_rows(&q)?.transpose(),
        labels: sh.labels,
    })
}

/// Projects channels × T data onto the basis: BᵀΓv.
pub fn decompose<T: Real>(basis: &HarmonicBasis<T>, weights: &SamplingWeights<T>, v: &Matrix<T>) -> Result<CoefficientSeries<T>> {
    let electrodes = basis.electrodes();
    if v.rows() != electrodes || weights.len() != electrodes {
        return Err(Error::Dimension(format!(
            "basis has {electrodes} electrodes, data {} channels, weights {}",
            v.rows(),
            weights.len()
        )));
    }
    let k = basis.functions();
    let t = v.cols();
    let mut coeffs = Matrix::from_elem(k, t, T::zero());
    // summation order over electrodes is fixed, so results do not depend on scheduling
    for i in 0..electrodes {
        let g = weights.diag()[i];
        let data = v.row(i);
        for j in 0..k {
            let b = basis.design[(i, j)] * g;
            if b == T::zero() {
                continue;
            }
            for (c, &x) in coeffs.row_mut(j).iter_mut().zip(data) {
                *c += b * x;
            }
        }
    }
    Ok(CoefficientSeries {
        coeffs,
        kind: basis.kind,
        order: basis.order,
    })
}
