use crate::connectivity::{ConnectivityMatrix, Method, Provenance};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Network organization matrix: symmetric, zero diagonal, off-diagonal in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Nom<T> {
    pub values: Matrix<T>,
    pub method: Method,
    pub provenance: Option<Provenance>,
}

impl<T: Real> Nom<T> {
    pub fn size(&self) -> usize {
        self.values.rows()
    }
}

fn check_symmetric<T: Real>(m: &Matrix<T>) -> Result<()> {
    let p = m.rows();
    if m.cols() != p {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", p, m.cols())));
    }
    for i in 0..p {
        if m[(i, i)] != T::zero() {
            return Err(Error::InvalidArgument(format!("diagonal entry {i} is not zero")));
        }
        for j in (i + 1)..p {
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Affine rescaling of the off-diagonal entries onto [0, 1]. A constant
/// off-diagonal part maps to all zeros.
pub fn minmax_normalize<T: Real>(c: &ConnectivityMatrix<T>) -> Result<Nom<T>> {
    let m = &c.values;
    check_symmetric(m)?;
    let p = m.rows();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..p {
        for j in (i + 1)..p {
            lo = lo.min(m[(i, j)]);
            hi = hi.max(m[(i, j)]);
        }
    }
    let span = hi - lo;
    let values = Matrix::from_fn(p, p, |i, j| {
        if i == j || !(span > T::zero()) {
            T::zero()
        } else {
            ((m[(i, j)] - lo) / span).min(T::one())
        }
    });
    Ok(Nom {
        values,
        method: c.method,
        provenance: c.provenance,
    })
}

/// Maps off-diagonal v to 1 − v (entropy-style measures, where low values
/// mean strong coupling).
pub fn invert_nom<T: Real>(nom: &Nom<T>) -> Nom<T> {
    let p = nom.size();
    Nom {
        values: Matrix::from_fn(p, p, |i, j| if i == j { T::zero() } else { T::one() - nom.values[(i, j)] }),
        method: nom.method,
        provenance: nom.provenance,
    }
}
