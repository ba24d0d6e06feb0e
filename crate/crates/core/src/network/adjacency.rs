use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

use super::Nom;

/// Undirected simple graph over p nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryAdjacency {
    adj: Matrix<u8>,
    neighbors: Vec<Vec<usize>>,
    pub threshold: f64,
}

impl BinaryAdjacency {
    /// Builds from a 0/1 matrix; it must be symmetric with a zero diagonal.
    pub fn from_matrix(adj: Matrix<u8>, threshold: f64) -> Result<Self> {
        let p = adj.rows();
        if adj.cols() != p {
            return Err(Error::Dimension("adjacency must be square".into()));
        }
        for i in 0..p {
            if adj[(i, i)] != 0 {
                return Err(Error::InvalidArgument(format!("self loop at node {i}")));
            }
            for j in 0..p {
                if adj[(i, j)] > 1 || adj[(i, j)] != adj[(j, i)] {
                    return Err(Error::InvalidArgument(format!("invalid entry at ({i}, {j})")));
                }
            }
        }
        let neighbors = (0..p).map(|i| (0..p).filter(|&j| adj[(i, j)] == 1).collect()).collect();
        Ok(BinaryAdjacency { adj, neighbors, threshold })
    }

    pub fn from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = Matrix::from_elem(p, p, 0u8);
        for &(a, b) in edges {
            if a >= p || b >= p || a == b {
                return Err(Error::InvalidArgument(format!("invalid edge ({a}, {b})")));
            }
            adj[(a, b)] = 1;
            adj[(b, a)] = 1;
        }
        Self::from_matrix(adj, f64::NAN)
    }

    pub fn size(&self) -> usize {
        self.adj.rows()
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[(i, j)] == 1
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn matrix(&self) -> &Matrix<u8> {
        &self.adj
    }
}

/// Edge wherever the normalized value is at least `threshold`.
pub fn binarize<T: Real>(nom: &Nom<T>, threshold: f64) -> Result<BinaryAdjacency> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Range(format!("threshold {threshold} outside (0, 1)")));
    }
    let tau = T::lit(threshold);
    let p = nom.size();
    let adj = Matrix::from_fn(p, p, |i, j| u8::from(i != j && nom.values[(i, j)] >= tau));
    let neighbors = (0..p).map(|i| (0..p).filter(|&j| adj[(i, j)] == 1).collect()).collect();
    Ok(BinaryAdjacency { adj, neighbors, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::Method;
    use rand::{Rng, SeedableRng};

    fn nom(m: Matrix<f64>) -> Nom<f64> {
        Nom {
            values: m,
            method: Method::Pli,
            provenance: None,
        }
    }

    #[test]
    fn threshold_inclusive() {
        let a = binarize(&nom(Matrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap()), 0.5).unwrap();
        assert_eq!(a.matrix().as_slice(), &[0, 1, 1, 0]);
    }

    #[test]
    fn above_max_is_empty() {
        let a = binarize(&nom(Matrix::from_rows(&[vec![0.0, 0.8], vec![0.8, 0.0]]).unwrap()), 0.81).unwrap();
        assert_eq!(a.edge_count(), 0);
        assert!(binarize(&nom(Matrix::from_elem(2, 2, 0.0)), 1.0).is_err());
        assert!(binarize(&nom(Matrix::from_elem(2, 2, 0.0)), 0.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn monotone_in_threshold(seed in 0u64..500, t1 in 0.01f64..0.99, t2 in 0.01f64..0.99) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = 10;
            let mut m = Matrix::from_elem(p, p, 0.0);
            for i in 0..p {
                for j in (i + 1)..p {
                    let v = rng.gen_range(0.0..1.0);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            let n = nom(m);
            let (a, b) = (binarize(&n, lo).unwrap(), binarize(&n, hi).unwrap());
            for i in 0..p {
                proptest::prop_assert!(!b.has_edge(i, i));
                for j in 0..p {
                    if b.has_edge(i, j) {
                        proptest::prop_assert!(a.has_edge(i, j));
                    }
                }
            }
        }
    }
}
