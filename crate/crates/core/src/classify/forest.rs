use std::marker::PhantomData;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal_io::GroupLabel;

use super::FeatureTable;

const CLASSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows until purity or `min_samples_split`.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// `None` means ⌈√d⌉.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            features_per_split: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config("n_trees must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be >= 2".into()));
        }
        if self.features_per_split == Some(0) {
            return Err(Error::Config("features_per_split must be >= 1".into()));
        }
        Ok(())
    }

    pub fn features_for(&self, d: usize) -> usize {
        let auto = (d as f64).sqrt().ceil() as usize;
        self.features_per_split.unwrap_or(auto).clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Node {
    Leaf {
        class: u8,
    },
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

/// Axis-aligned binary decision tree; samples with `x[feature] <= threshold`
/// go left.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    oob: Vec<u32>,
}

impl Tree {
    /// Single-leaf tree that always predicts `class`.
    pub fn constant(class: GroupLabel) -> Tree {
        Tree {
            nodes: vec![Node::Leaf {
                class: class.index() as u8,
            }],
            oob: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left as usize).max(walk(nodes, right as usize)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Training rows left out of this tree's bootstrap sample.
    pub fn out_of_bag(&self) -> &[u32] {
        &self.oob
    }

    fn classify(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { class } => return class as usize,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[feature as usize] + 0.0 <= threshold { left } else { right } as usize;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedForest<T> {
    pub trees: Vec<Tree>,
    pub classes: Vec<GroupLabel>,
    pub config: ForestConfig,
    dims: usize,
    n_train: usize,
    _scalar: PhantomData<T>,
}

impl<T: Real> TrainedForest<T> {
    /// Assembles a forest from prebuilt trees.
    pub fn from_trees(trees: Vec<Tree>, dims: usize) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::Classify("a forest needs at least one tree".into()));
        }
        let mut classes: Vec<GroupLabel> = trees
            .iter()
            .flat_map(|t| t.nodes.iter())
            .filter_map(|n| match n {
                Node::Leaf { class } => GroupLabel::from_index(*class as usize),
                Node::Split { .. } => None,
            })
            .collect();
        classes.sort();
        classes.dedup();
        Ok(TrainedForest {
            config: ForestConfig {
                n_trees: trees.len(),
                ..Default::default()
            },
            trees,
            classes,
            dims,
            n_train: 0,
            _scalar: PhantomData,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Per-class vote counts in the order AD, MCI, HC.
    pub fn votes(&self, row: &[T]) -> Result<[usize; CLASSES]> {
        if row.len() != self.dims {
            return Err(Error::Dimension(format!(
                "row has {} features, forest expects {}",
                row.len(),
                self.dims
            )));
        }
        let x: Vec<f64> = row.iter().map(|v| v.as_f64()).collect();
        let mut votes = [0usize; CLASSES];
        for tree in &self.trees {
            votes[tree.classify(&x)] += 1;
        }
        Ok(votes)
    }

    /// Majority vote; ties resolve to the earliest class in AD, MCI, HC.
    pub fn predict(&self, row: &[T]) -> Result<GroupLabel> {
        Ok(majority(&self.votes(row)?))
    }

    pub fn predict_table(&self, table: &FeatureTable<T>) -> Result<Vec<GroupLabel>> {
        if table.dims() != self.dims {
            return Err(Error::Dimension(format!(
                "table has {} features, forest expects {}",
                table.dims(),
                self.dims
            )));
        }
        (0..table.len()).into_par_iter().map(|i| self.predict(table.rows.row(i))).collect()
    }

    /// Accuracy of out-of-bag votes on the training table; `None` when no
    /// row was ever left out.
    pub fn oob_accuracy(&self, train: &FeatureTable<T>) -> Result<Option<f64>> {
        if train.len() != self.n_train || train.dims() != self.dims {
            return Err(Error::Dimension("table is not the training table of this forest".into()));
        }
        let mut votes = vec![[0usize; CLASSES]; train.len()];
        let mut x = vec![0.0; self.dims];
        for tree in &self.trees {
            for &r in &tree.oob {
                for (dst, v) in x.iter_mut().zip(train.rows.row(r as usize)) {
                    *dst = v.as_f64();
                }
                votes[r as usize][tree.classify(&x)] += 1;
            }
        }
        let (mut seen, mut correct) = (0usize, 0usize);
        for (v, label) in votes.iter().zip(&train.labels) {
            if v.iter().sum::<usize>() > 0 {
                seen += 1;
                correct += usize::from(majority(v) == *label);
            }
        }
        Ok((seen > 0).then(|| correct as f64 / seen as f64))
    }
}

fn majority(votes: &[usize; CLASSES]) -> GroupLabel {
    let mut best = 0;
    for c in 1..CLASSES {
        if votes[c] > votes[best] {
            best = c;
        }
    }
    GroupLabel::from_index(best).expect("class index")
}

/// Column-major training data with per-feature value ranks.
struct Prepared {
    n: usize,
    labels: Vec<u8>,
    ranks: Vec<Vec<u32>>,
    uniques: Vec<Vec<f64>>,
}

impl Prepared {
    fn new<T: Real>(table: &FeatureTable<T>) -> Prepared {
        let n = table.len();
        let d = table.dims();
        let (ranks, uniques) = (0..d)
            .into_par_iter()
            .map(|f| {
                // + 0.0 folds -0.0 into 0.0
                let col: Vec<f64> = (0..n).map(|r| table.rows[(r, f)].as_f64() + 0.0).collect();
                let mut uniq = col.clone();
                uniq.sort_by(f64::total_cmp);
                uniq.dedup();
                let rank = col
                    .iter()
                    .map(|v| uniq.binary_search_by(|u| u.total_cmp(v)).expect("present") as u32)
                    .collect();
                (rank, uniq)
            })
            .unzip();
        Prepared {
            n,
            labels: table.labels.iter().map(|l| l.index() as u8).collect(),
            ranks,
            uniques,
        }
    }
}

/// Exact split score: Σ cL²/nL + Σ cR²/nR as a fraction; larger is purer.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn of(left: &[u64; CLASSES], nl: u64, right: &[u64; CLASSES], nr: u64) -> Score {
        let sq = |c: &[u64; CLASSES]| c.iter().map(|&v| (v * v) as u128).sum::<u128>();
        Score {
            num: sq(left) * nr as u128 + sq(right) * nl as u128,
            den: nl as u128 * nr as u128,
        }
    }

    fn beats(&self, other: &Score) -> bool {
        self.num * other.den > other.num * self.den
    }
}

struct Candidate {
    score: Score,
    feature: usize,
    split_rank: u32,
    threshold: f64,
}

struct Builder<'a> {
    data: &'a Prepared,
    cfg: &'a ForestConfig,
    k: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    bucket: Vec<[u64; CLASSES]>,
    keys: Vec<u64>,
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a / 2.0 + b / 2.0;
    if m >= b || m < a {
        a
    } else {
        m
    }
}

impl<'a> Builder<'a> {
    fn counts(&self, idx: &[u32]) -> [u64; CLASSES] {
        let mut c = [0u64; CLASSES];
        for &i in idx {
            c[self.data.labels[i as usize] as usize] += 1;
        }
        c
    }

    fn leaf(counts: &[u64; CLASSES]) -> Node {
        let mut best = 0;
        for c in 1..CLASSES {
            if counts[c] > counts[best] {
                best = c;
            }
        }
        Node::Leaf { class: best as u8 }
    }

    /// Scans one feature and updates `best` on strict improvement.
    fn scan(&mut self, f: usize, idx: &[u32], total: &[u64; CLASSES], best: &mut Option<Candidate>) {
        let data = self.data;
        let (ranks, uniq, labels) = (&data.ranks[f], &data.uniques[f], &data.labels);
        let n = idx.len() as u64;
        let consider = |prev: u32, cur: u32, left: &[u64; CLASSES], nl: u64, best: &mut Option<Candidate>| {
            let right = [total[0] - left[0], total[1] - left[1], total[2] - left[2]];
            let score = Score::of(left, nl, &right, n - nl);
            if best.as_ref().is_none_or(|b| score.beats(&b.score)) {
                *best = Some(Candidate {
                    score,
                    feature: f,
                    split_rank: prev,
                    threshold: midpoint(uniq[prev as usize], uniq[cur as usize]),
                });
            }
        };
        if uniq.len() <= 2 * idx.len() {
            self.bucket.clear();
            self.bucket.resize(uniq.len(), [0; CLASSES]);
            for &i in idx {
                self.bucket[ranks[i as usize] as usize][labels[i as usize] as usize] += 1;
            }
            let mut left = [0u64; CLASSES];
            let mut nl = 0u64;
            let mut prev: Option<u32> = None;
            for (r, c) in self.bucket.iter().enumerate() {
                let m = c[0] + c[1] + c[2];
                if m == 0 {
                    continue;
                }
                if let Some(p) = prev {
                    consider(p, r as u32, &left, nl, best);
                }
                for k in 0..CLASSES {
                    left[k] += c[k];
                }
                nl += m;
                prev = Some(r as u32);
            }
        } else {
            self.keys.clear();
            self.keys
                .extend(idx.iter().map(|&i| ((ranks[i as usize] as u64) << 2) | labels[i as usize] as u64));
            self.keys.sort_unstable();
            let mut left = [0u64; CLASSES];
            let mut nl = 0u64;
            for j in 0..self.keys.len() {
                let key = self.keys[j];
                left[(key & 3) as usize] += 1;
                nl += 1;
                if let Some(&next) = self.keys.get(j + 1) {
                    let (r, rn) = ((key >> 2) as u32, (next >> 2) as u32);
                    if rn != r {
                        consider(r, rn, &left, nl, best);
                    }
                }
            }
        }
    }

    fn grow(mut self, mut idx: Vec<u32>) -> Vec<Node> {
        let d = self.data.ranks.len();
        // (node slot, start, end, depth)
        let mut stack = vec![(0usize, 0usize, idx.len(), 0usize)];
        self.nodes.push(Node::Leaf { class: 0 });
        while let Some((slot, start, end, depth)) = stack.pop() {
            let counts = self.counts(&idx[start..end]);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_capped = self.cfg.max_depth.is_some_and(|m| depth >= m);
            if pure || depth_capped || end - start < self.cfg.min_samples_split {
                self.nodes[slot] = Self::leaf(&counts);
                continue;
            }
            let mut features = sample(&mut self.rng, d, self.k).into_vec();
            features.sort_unstable();
            let mut best = None;
            for f in features {
                self.scan(f, &idx[start..end], &counts, &mut best);
            }
            let Some(split) = best else {
                self.nodes[slot] = Self::leaf(&counts);
                continue;
            };
            let ranks = &self.data.ranks[split.feature];
            let part = &mut idx[start..end];
            let mut mid = 0;
            for j in 0..part.len() {
                if ranks[part[j] as usize] <= split.split_rank {
                    part.swap(mid, j);
                    mid += 1;
                }
            }
            let (left, right) = (self.nodes.len(), self.nodes.len() + 1);
            self.nodes.push(Node::Leaf { class: 0 });
            self.nodes.push(Node::Leaf { class: 0 });
            self.nodes[slot] = Node::Split {
                feature: split.feature as u32,
                threshold: split.threshold,
                left: left as u32,
                right: right as u32,
            };
            stack.push((right, start + mid, end, depth + 1));
            stack.push((left, start, start + mid, depth + 1));
        }
        self.nodes
    }
}

fn train_tree(data: &Prepared, cfg: &ForestConfig, k: usize, tree_index: usize) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ tree_index as u64);
    let n = data.n;
    let (idx, oob) = if cfg.bootstrap {
        let mut in_bag = vec![false; n];
        let idx: Vec<u32> = (0..n)
            .map(|_| {
                let i = rng.gen_range(0..n);
                in_bag[i] = true;
                i as u32
            })
            .collect();
        let oob = (0..n as u32).filter(|&i| !in_bag[i as usize]).collect();
        (idx, oob)
    } else {
        ((0..n as u32).collect(), Vec::new())
    };
    let builder = Builder {
        data,
        cfg,
        k,
        rng,
        nodes: Vec::new(),
        bucket: Vec::new(),
        keys: Vec::new(),
    };
    Tree {
        nodes: builder.grow(idx),
        oob,
    }
}

/// Fits a random forest of Gini-split trees. Each tree draws from its own
/// stream seeded with `seed ^ tree_index`, so results do not depend on how
/// trees are scheduled.
pub fn train_forest<T: Real>(table: &FeatureTable<T>, cfg: &ForestConfig) -> Result<TrainedForest<T>> {
    cfg.validate()?;
    if table.len() < 2 {
        return Err(Error::Classify(format!("need at least 2 rows, got {}", table.len())));
    }
    if table.dims() == 0 {
        return Err(Error::Classify("table has no features".into()));
    }
    let mut classes = table.labels.clone();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Classify(format!(
            "only class {} present; use a constant predictor instead",
            classes[0]
        )));
    }
    let data = Prepared::new(table);
    let k = cfg.features_for(table.dims());
    let trees = (0..cfg.n_trees).into_par_iter().map(|t| train_tree(&data, cfg, k, t)).collect();
    Ok(TrainedForest {
        trees,
        classes,
        config: *cfg,
        dims: table.dims(),
        n_train: table.len(),
        _scalar: PhantomData,
    })
}
