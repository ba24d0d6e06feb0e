//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, SymmetricEigen};
use wmfc::network::BinaryAdjacency;

/// Edge list of the graph on `p` vertices encoded by the bits of `mask`
/// over the pairs (i, j), i < j, in row-major order.
pub fn graph_from_mask(p: usize, mask: u64) -> BinaryAdjacency {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..p {
        for j in (i + 1)..p {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    BinaryAdjacency::from_edges(p, &edges).unwrap()
}

fn adjacency_lists(a: &BinaryAdjacency) -> Vec<Vec<usize>> {
    let p = a.size();
    (0..p).map(|i| (0..p).filter(|&j| a.has_edge(i, j)).collect()).collect()
}

pub fn degree_oracle(a: &BinaryAdjacency) -> Vec<usize> {
    let p = a.size();
    (0..p).map(|i| (0..p).map(|j| a.matrix()[(i, j)] as usize).sum()).collect()
}

pub fn clustering_oracle(a: &BinaryAdjacency) -> Vec<f64> {
    let p = a.size();
    (0..p)
        .map(|k| {
            let nb: Vec<usize> = (0..p).filter(|&j| a.has_edge(k, j)).collect();
            let d = nb.len();
            if d <= 1 {
                return 0.0;
            }
            let mut links = 0usize;
            for x in 0..d {
                for y in (x + 1)..d {
                    links += a.has_edge(nb[x], nb[y]) as usize;
                }
            }
            (2 * links) as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy)]
struct Frac(u128, u128);

impl Frac {
    fn add(self, o: Frac) -> Frac {
        let n = self.0 * o.1 + o.0 * self.1;
        let d = self.1 * o.1;
        let g = gcd(n, d).max(1);
        Frac(n / g, d / g)
    }
}

/// Enumerates every shortest path explicitly and accumulates the
/// pass-through fractions as exact rationals.
pub fn betweenness_oracle(a: &BinaryAdjacency) -> Vec<f64> {
    let p = a.size();
    let adj = adjacency_lists(a);
    let mut acc = vec![Frac(0, 1); p];
    for h in 0..p {
        let mut dist = vec![usize::MAX; p];
        dist[h] = 0;
        let mut q = VecDeque::from([h]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        for j in 0..p {
            if j == h || dist[j] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![h]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == j {
                    paths.push(path);
                    continue;
                }
                for &w in &adj[last] {
                    if dist[w] == dist[last] + 1 && dist[w] <= dist[j] {
                        let mut next = path.clone();
                        next.push(w);
                        stack.push(next);
                    }
                }
            }
            let total = paths.len() as u128;
            for k in 0..p {
                if k == h || k == j {
                    continue;
                }
                let through = paths.iter().filter(|path| path.contains(&k)).count() as u128;
                if through > 0 {
                    acc[k] = acc[k].add(Frac(through, total));
                }
            }
        }
    }
    let norm = if p > 2 { ((p - 1) * (p - 2)) as f64 } else { 1.0 };
    acc.iter().map(|f| f.0 as f64 / f.1 as f64 / norm).collect()
}

/// Shell index by definition: the largest k whose k-core (obtained by
/// repeatedly deleting vertices of degree < k) contains the vertex.
pub fn shell_oracle(a: &BinaryAdjacency) -> Vec<usize> {
    let p = a.size();
    let mut shell = vec![0; p];
    for k in 1..p {
        let mut alive = vec![true; p];
        loop {
            let drop: Vec<usize> = (0..p)
                .filter(|&v| alive[v] && (0..p).filter(|&u| alive[u] && a.has_edge(v, u)).count() < k)
                .collect();
            if drop.is_empty() {
                break;
            }
            for v in drop {
                alive[v] = false;
            }
        }
        for v in 0..p {
            if alive[v] {
                shell[v] = k;
            }
        }
    }
    shell
}

pub fn coreness_oracle(a: &BinaryAdjacency) -> Vec<usize> {
    let s = shell_oracle(a);
    let p = a.size();
    (0..p).map(|i| (0..p).filter(|&j| a.has_edge(i, j)).map(|j| s[j]).sum()).collect()
}

/// Dense eigensolver reference: the uniform vector projected onto the
/// eigenspace of the largest eigenvalue, then normalized. This is the limit
/// of power iteration from the uniform start, including when the dominant
/// eigenvalue is repeated (disconnected graphs).
pub fn eigenvector_oracle(a: &BinaryAdjacency) -> Vec<f64> {
    let p = a.size();
    if a.edge_count() == 0 {
        return vec![0.0; p];
    }
    let m = DMatrix::from_fn(p, p, |i, j| a.matrix()[(i, j)] as f64);
    let eig = SymmetricEigen::new(m);
    let top = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut v = vec![0.0; p];
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if (lambda - top).abs() < 1e-9 {
            let col = eig.eigenvectors.column(k);
            let coef: f64 = col.iter().sum();
            for i in 0..p {
                v[i] += coef * col[i];
            }
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// Cross-plot state of each sample for the fixed-count grid, written out
/// directly from the band and sector rules.
pub fn count_states_oracle(u: &[f64], v: &[f64], bands: usize, sectors: usize) -> Vec<(u32, u32)> {
    let r: Vec<f64> = u.iter().zip(v).map(|(a, b)| (a * a + b * b).sqrt()).collect();
    let r_max = r.iter().cloned().fold(0.0, f64::max);
    u.iter()
        .zip(v)
        .zip(&r)
        .map(|((&a, &b), &ri)| {
            if r_max == 0.0 {
                return (0, 0);
            }
            let band = ((ri * bands as f64 / r_max).floor() as usize).min(bands - 1);
            let mut deg = b.atan2(a).to_degrees();
            if deg < 0.0 {
                deg += 360.0;
            }
            if deg >= 360.0 {
                deg = 0.0;
            }
            let sector = ((deg * sectors as f64 / 360.0).floor() as usize).min(sectors - 1);
            (band as u32, sector as u32)
        })
        .collect()
}

/// Shannon entropy in bits of consecutive-state transitions.
pub fn transition_entropy_oracle(states: &[(u32, u32)]) -> f64 {
    let mut counts: BTreeMap<((u32, u32), (u32, u32)), usize> = BTreeMap::new();
    for w in states.windows(2) {
        *counts.entry((w[0], w[1])).or_default() += 1;
    }
    let total = (states.len() - 1) as f64;
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Magnitude of the cascade's transfer function at `f` Hz.
pub fn filter_gain(f: &wmfc::preprocess::FilterSections, freq: f64, fs: f64) -> f64 {
    use rustfft::num_complex::Complex64;
    let z1 = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * freq / fs);
    let z2 = z1 * z1;
    let h = f.sections.iter().fold(Complex64::new(f.gain, 0.0), |h, s| {
        h * (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2)
    });
    h.norm()
}
