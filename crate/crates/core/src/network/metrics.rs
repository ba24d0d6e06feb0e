use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::BinaryAdjacency;

const EIGEN_TOL: f64 = 1e-12;
const EIGEN_MAX_ITER: usize = 10_000;

/// The five node-level metrics. Feature ids follow the f1..f5 numbering:
/// clustering f1, eigenvector f2, betweenness f3, degree f4, coreness f5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MetricKind {
    Degree,
    Clustering,
    Eigenvector,
    Betweenness,
    Coreness,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Degree,
        MetricKind::Clustering,
        MetricKind::Eigenvector,
        MetricKind::Betweenness,
        MetricKind::Coreness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Degree => "D",
            MetricKind::Clustering => "C",
            MetricKind::Eigenvector => "EC",
            MetricKind::Betweenness => "BC",
            MetricKind::Coreness => "Cc",
        }
    }

    pub fn feature_id(self) -> &'static str {
        match self {
            MetricKind::Clustering => "f1",
            MetricKind::Eigenvector => "f2",
            MetricKind::Betweenness => "f3",
            MetricKind::Degree => "f4",
            MetricKind::Coreness => "f5",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl TryFrom<String> for MetricKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MetricKind> for String {
    fn from(k: MetricKind) -> String {
        k.as_str().to_string()
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let kind = match key.as_str() {
            "d" | "degree" | "f4" => MetricKind::Degree,
            "c" | "clustering" | "f1" => MetricKind::Clustering,
            "ec" | "eigenvector" | "f2" => MetricKind::Eigenvector,
            "bc" | "betweenness" | "f3" => MetricKind::Betweenness,
            "cc" | "coreness" | "f5" => MetricKind::Coreness,
            _ => return Err(Error::InvalidArgument(format!("unknown metric '{s}'"))),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeMetrics<T> {
    pub degree: Vec<usize>,
    pub clustering: Vec<T>,
    pub eigenvector: Vec<T>,
    pub betweenness: Vec<T>,
    pub coreness: Vec<usize>,
    pub shells: Vec<usize>,
}

impl<T: Real> NodeMetrics<T> {
    pub fn get(&self, kind: MetricKind) -> Vec<T> {
        match kind {
            MetricKind::Degree => self.degree.iter().map(|&d| T::from_count(d)).collect(),
            MetricKind::Clustering => self.clustering.clone(),
            MetricKind::Eigenvector => self.eigenvector.clone(),
            MetricKind::Betweenness => self.betweenness.clone(),
            MetricKind::Coreness => self.coreness.iter().map(|&d| T::from_count(d)).collect(),
        }
    }
}

pub fn degree(a: &BinaryAdjacency) -> Vec<usize> {
    (0..a.size()).map(|k| a.neighbors(k).len()).collect()
}

/// Local clustering coefficient; nodes with degree <= 1 get 0.
pub fn clustering<T: Real>(a: &BinaryAdjacency) -> Vec<T> {
    (0..a.size())
        .map(|k| {
            let nb = a.neighbors(k);
            let d = nb.len();
            if d <= 1 {
                return T::zero();
            }
            let mut links = 0usize;
            for (i, &u) in nb.iter().enumerate() {
                links += nb[i + 1..].iter().filter(|&&w| a.has_edge(u, w)).count();
            }
            T::from_count(2 * links) / T::from_count(d * (d - 1))
        })
        .collect()
}

/// Dominant eigenvector by power iteration on `A + I`, started from the
/// uniform vector. The shift keeps the eigenvectors and makes the dominant
/// eigenvalue strictly largest in magnitude, so bipartite graphs converge
/// instead of oscillating.
pub fn eigenvector_centrality<T: Real>(a: &BinaryAdjacency) -> Vec<T> {
    let p = a.size();
    if a.edge_count() == 0 {
        return vec![T::zero(); p];
    }
    let tol = T::lit(EIGEN_TOL);
    let mut x = vec![T::one() / T::from_count(p).sqrt(); p];
    let mut next = vec![T::zero(); p];
    for _ in 0..EIGEN_MAX_ITER {
        for (k, out) in next.iter_mut().enumerate() {
            *out = x[k] + a.neighbors(k).iter().map(|&j| x[j]).sum::<T>();
        }
        let norm = next.iter().map(|&v| v * v).sum::<T>().sqrt();
        let mut diff = T::zero();
        for (out, &old) in next.iter_mut().zip(&x) {
            *out /= norm;
            diff = diff.max((*out - old).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if diff < tol {
            break;
        }
    }
    x
}

/// Brandes betweenness over unweighted shortest paths, normalized by the
/// number of ordered pairs (I-1)(I-2).
pub fn betweenness<T: Real>(a: &BinaryAdjacency) -> Vec<T> {
    let p = a.size();
    let mut bc = vec![T::zero(); p];
    if p < 3 {
        return bc;
    }
    let mut sigma = vec![T::zero(); p];
    let mut dist = vec![usize::MAX; p];
    let mut delta = vec![T::zero(); p];
    let mut order = Vec::with_capacity(p);
    let mut queue = VecDeque::with_capacity(p);
    for s in 0..p {
        sigma.iter_mut().for_each(|v| *v = T::zero());
        dist.iter_mut().for_each(|v| *v = usize::MAX);
        delta.iter_mut().for_each(|v| *v = T::zero());
        order.clear();
        sigma[s] = T::one();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in a.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    let sv = sigma[v];
                    sigma[w] += sv;
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in a.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    let share = sigma[v] / sigma[w] * (T::one() + delta[w]);
                    delta[v] += share;
                }
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    let scale = T::from_count((p - 1) * (p - 2));
    bc.iter_mut().for_each(|v| *v /= scale);
    bc
}

/// k-core shell index of every node by minimum-degree peeling.
pub fn shell_indices(a: &BinaryAdjacency) -> Vec<usize> {
    let p = a.size();
    let mut deg = degree(a);
    let mut removed = vec![false; p];
    let mut shell = vec![0usize; p];
    let mut level = 0usize;
    for _ in 0..p {
        let v = (0..p)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("a node remains");
        level = level.max(deg[v]);
        shell[v] = level;
        removed[v] = true;
        for &w in a.neighbors(v) {
            if !removed[w] {
                deg[w] -= 1;
            }
        }
    }
    shell
}

/// Sum of the neighbors' shell indices.
pub fn coreness_centrality(a: &BinaryAdjacency) -> Vec<usize> {
    let shell = shell_indices(a);
    coreness_from_shells(a, &shell)
}

fn coreness_from_shells(a: &BinaryAdjacency, shell: &[usize]) -> Vec<usize> {
    (0..a.size()).map(|k| a.neighbors(k).iter().map(|&j| shell[j]).sum()).collect()
}

pub fn node_metrics<T: Real>(a: &BinaryAdjacency) -> NodeMetrics<T> {
    let shells = shell_indices(a);
    NodeMetrics {
        degree: degree(a),
        clustering: clustering(a),
        eigenvector: eigenvector_centrality(a),
        betweenness: betweenness(a),
        coreness: coreness_from_shells(a, &shells),
        shells,
    }
}

/// A single metric as a real vector.
pub fn metric_vector<T: Real>(a: &BinaryAdjacency, kind: MetricKind) -> Vec<T> {
    let counts = |v: Vec<usize>| v.into_iter().map(T::from_count).collect();
    match kind {
        MetricKind::Degree => counts(degree(a)),
        MetricKind::Clustering => clustering(a),
        MetricKind::Eigenvector => eigenvector_centrality(a),
        MetricKind::Betweenness => betweenness(a),
        MetricKind::Coreness => counts(coreness_centrality(a)),
    }
}
