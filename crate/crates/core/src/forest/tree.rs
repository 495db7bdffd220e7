//! CART regression trees with variance impurity.
//!
//! A node is split only when it holds more than `min_node_size` rows. The
//! split minimizes `n_l·Var_l + n_r·Var_r`, which is the same as maximizing
//! `S_l²/n_l + S_r²/n_r` over target sums. Thresholds sit at midpoints of
//! consecutive distinct values; ties keep the lower feature index, then the
//! lower threshold.

use std::fmt;

use rand::seq::index;
use rand::Rng;

use super::embed::EmbeddedData;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    /// Position in the ensemble; fixes the summation order of predictions.
    pub id: usize,
    nodes: Vec<Node>,
}

impl Tree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Index of the leaf reached by `x` (`x[feature] <= threshold` goes left).
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(nodes: &[Node], i: usize, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(depth);
            match &nodes[i] {
                Node::Leaf { value } => writeln!(f, "{pad}leaf {value}"),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    writeln!(f, "{pad}lag{} <= {threshold}", feature + 1)?;
                    go(nodes, *left, depth + 1, f)?;
                    go(nodes, *right, depth + 1, f)
                }
            }
        }
        writeln!(f, "tree {}", self.id)?;
        go(&self.nodes, 0, 1, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// `SSE(parent) − SSE(left) − SSE(right)`.
    pub impurity_decrease: f64,
}

/// Best sweep cut over `(x, y)` pairs, already sorted by `x`.
/// Returns `(threshold, S_l²/n_l + S_r²/n_r)`.
fn scan_sorted(pairs: &[(f64, f64)], total: f64) -> Option<(f64, f64)> {
    let n = pairs.len();
    let mut best: Option<(f64, f64)> = None;
    let mut left = 0.0;
    for j in 0..n - 1 {
        left += pairs[j].1;
        let (a, b) = (pairs[j].0, pairs[j + 1].0);
        if a < b {
            let nl = (j + 1) as f64;
            let right = total - left;
            let score = left * left / nl + right * right / (n as f64 - nl);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((midpoint(a, b), score));
            }
        }
    }
    best
}

fn midpoint(a: f64, b: f64) -> f64 {
    let mid = a + (b - a) * 0.5;
    if mid < b {
        mid
    } else {
        a
    }
}

fn sse(ys: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let sum: f64 = ys.clone().sum();
    let mean = sum / n as f64;
    let sse = ys.map(|y| (y - mean) * (y - mean)).sum();
    (sum, sse)
}

fn accept(decrease: f64, parent_sse: f64) -> bool {
    decrease > 0.0 && decrease > 1e-12 * parent_sse
}

/// Best variance-reducing split of a node over `feature_subset`.
///
/// `rows` is row-major with `rows.len() = targets.len() · lag_count`.
/// Returns `None` when no candidate split lowers the weighted impurity.
pub fn best_split(
    rows: &[f64],
    lag_count: usize,
    targets: &[f64],
    feature_subset: &[usize],
) -> Option<SplitCandidate> {
    let n = targets.len();
    if n < 2 || lag_count == 0 {
        return None;
    }
    assert_eq!(rows.len(), n * lag_count, "row matrix does not match targets");
    let (total, parent_sse) = sse(targets.iter().copied(), n);
    let base = total * total / n as f64;
    let mut features = feature_subset.to_vec();
    features.sort_unstable();
    let mut pairs = Vec::with_capacity(n);
    let mut best: Option<(usize, f64, f64)> = None;
    for &f in &features {
        pairs.clear();
        pairs.extend((0..n).map(|i| (rows[i * lag_count + f], targets[i])));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((thr, score)) = scan_sorted(&pairs, total) {
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((f, thr, score));
            }
        }
    }
    let (feature, threshold, score) = best?;
    let decrease = score - base;
    accept(decrease, parent_sse).then_some(SplitCandidate {
        feature,
        threshold,
        impurity_decrease: decrease,
    })
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub mtry: usize,
    pub min_node_size: usize,
    pub max_depth: Option<usize>,
}

/// Column-major working copy of one tree's training sample.
struct Grower<'a, R: Rng + ?Sized> {
    columns: Vec<Vec<f64>>,
    targets: Vec<f64>,
    params: GrowParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
    pairs: Vec<(f64, f64)>,
}

/// Grows a tree on the rows of `data` selected by `sample` (0-based, with
/// repeats), or on every row when `sample` is `None`.
pub(crate) fn grow_tree<R: Rng + ?Sized>(
    data: &EmbeddedData,
    sample: Option<&[usize]>,
    params: GrowParams,
    rng: &mut R,
) -> Tree {
    let l = data.lag_count();
    let (columns, targets) = match sample {
        Some(rows) => {
            let columns = (0..l)
                .map(|f| rows.iter().map(|&i| data.row(i)[f]).collect())
                .collect();
            let targets = rows.iter().map(|&i| data.targets()[i]).collect();
            (columns, targets)
        }
        None => {
            let columns = (0..l)
                .map(|f| data.rows().map(|r| r[f]).collect())
                .collect();
            (columns, data.targets().to_vec())
        }
    };
    let m = targets.len();
    let mut grower = Grower {
        columns,
        targets,
        params,
        rng,
        nodes: Vec::new(),
        pairs: Vec::with_capacity(m),
    };
    let mut idx: Vec<u32> = (0..m as u32).collect();
    grower.grow(&mut idx, 0);
    Tree {
        id: 0,
        nodes: grower.nodes,
    }
}

impl<R: Rng + ?Sized> Grower<'_, R> {
    fn grow(&mut self, idx: &mut [u32], depth: usize) -> usize {
        let n = idx.len();
        let (total, parent_sse) = sse(idx.iter().map(|&i| self.targets[i as usize]), n);
        let leaf = Node::Leaf {
            value: total / n as f64,
        };
        let at = self.nodes.len();
        if n <= self.params.min_node_size
            || self.params.max_depth.is_some_and(|d| depth >= d)
            || !(parent_sse > 0.0)
        {
            self.nodes.push(leaf);
            return at;
        }
        let Some((feature, threshold)) = self.find_split(idx, total, parent_sse) else {
            self.nodes.push(leaf);
            return at;
        };

        let col = &self.columns[feature];
        let mut mid = 0;
        for j in 0..n {
            if col[idx[j] as usize] <= threshold {
                idx.swap(mid, j);
                mid += 1;
            }
        }
        debug_assert!(mid > 0 && mid < n);

        self.nodes.push(Node::Leaf { value: 0.0 });
        let (l_idx, r_idx) = idx.split_at_mut(mid);
        let left = self.grow(l_idx, depth + 1);
        let right = self.grow(r_idx, depth + 1);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }

    fn find_split(&mut self, idx: &[u32], total: f64, parent_sse: f64) -> Option<(usize, f64)> {
        let l = self.columns.len();
        let n = idx.len();
        let mut features: Vec<usize> = if self.params.mtry >= l {
            (0..l).collect()
        } else {
            index::sample(self.rng, l, self.params.mtry).into_vec()
        };
        features.sort_unstable();

        let mut best: Option<(usize, f64, f64)> = None;
        for f in features {
            let col = &self.columns[f];
            self.pairs.clear();
            self.pairs
                .extend(idx.iter().map(|&i| (col[i as usize], self.targets[i as usize])));
            self.pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            if let Some((thr, score)) = scan_sorted(&self.pairs, total) {
                if best.is_none_or(|(_, _, s)| score > s) {
                    best = Some((f, thr, score));
                }
            }
        }
        let (f, thr, score) = best?;
        accept(score - total * total / n as f64, parent_sse).then_some((f, thr))
    }
}
