//! Random forest of CART trees grown on bootstrap samples with the Gini
//! criterion and `⌊√d⌋` candidate features per split.

use serde::{Deserialize, Serialize};

use crate::numkit::{Matrix, RngStream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        artifact_fraction: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_fraction(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { artifact_fraction } => return *artifact_fraction,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Hard vote of the leaf `x` falls into.
    pub fn votes_artifact(&self, x: &[f64]) -> bool {
        self.leaf_fraction(x) > 0.5
    }
}

pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub max_features: usize,
}

fn gini(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [bool],
    params: &'a TreeParams,
    nodes: Vec<Node>,
    scratch: Vec<(f64, bool)>,
}

impl Builder<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let pos = rows.iter().filter(|&&i| self.y[i]).count();
        self.nodes.push(Node::Leaf {
            artifact_fraction: pos as f64 / rows.len() as f64,
        });
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize, rng: &mut RngStream) -> usize {
        let n = rows.len();
        let pos = rows.iter().filter(|&&i| self.y[i]).count();
        if depth >= self.params.max_depth || n < 2 * self.params.min_leaf || pos == 0 || pos == n {
            return self.leaf(rows);
        }
        let d = self.x.n_cols();
        let candidates = rng.sample_without_replacement(d, self.params.max_features.min(d));
        let parent = gini(pos as f64, n as f64);
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &candidates {
            self.scratch.clear();
            self.scratch
                .extend(rows.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            self.scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0usize;
            for k in 1..n {
                left_pos += usize::from(self.scratch[k - 1].1);
                if self.scratch[k - 1].0 == self.scratch[k].0 {
                    continue;
                }
                let nl = k;
                let nr = n - k;
                if nl < self.params.min_leaf || nr < self.params.min_leaf {
                    continue;
                }
                let impurity = (nl as f64 * gini(left_pos as f64, nl as f64)
                    + nr as f64 * gini((pos - left_pos) as f64, nr as f64))
                    / n as f64;
                let gain = parent - impurity;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g) {
                    let threshold = 0.5 * (self.scratch[k - 1].0 + self.scratch[k].0);
                    best = Some((gain, f, threshold));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return self.leaf(rows);
        };
        // partition in place: left block first
        let mut split = 0;
        for k in 0..n {
            if self.x.get(rows[k], feature) <= threshold {
                rows.swap(split, k);
                split += 1;
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            artifact_fraction: 0.0,
        });
        let (l, r) = rows.split_at_mut(split);
        let left = self.grow(l, depth + 1, rng);
        let right = self.grow(r, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

pub fn grow_tree(x: &Matrix, y: &[bool], rows: &mut [usize], params: &TreeParams, rng: &mut RngStream) -> Tree {
    let mut b = Builder {
        x,
        y,
        params,
        nodes: Vec::new(),
        scratch: Vec::with_capacity(rows.len()),
    };
    b.grow(rows, 0, rng);
    Tree { nodes: b.nodes }
}

/// Each tree gets its own derived stream, so tree `t` depends only on
/// `(seed, t)`.
pub fn grow_forest(x: &Matrix, y: &[bool], n_trees: usize, params: &TreeParams, seed: u64) -> Vec<Tree> {
    let n = x.n_rows();
    (0..n_trees)
        .map(|t| {
            let mut rng = RngStream::derived(seed, t as u64 + 1);
            let mut rows: Vec<usize> = (0..n).map(|_| rng.index(n)).collect();
            grow_tree(x, y, &mut rows, params, &mut rng)
        })
        .collect()
}

pub fn vote_fraction(trees: &[Tree], x: &[f64]) -> f64 {
    trees.iter().filter(|t| t.votes_artifact(x)).count() as f64 / trees.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_recovers_threshold() {
        let vals: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<bool> = vals.iter().map(|&v| v > 6.2).collect();
        let x = Matrix::from_vec(20, 1, vals.clone()).unwrap();
        let params = TreeParams { max_depth: 1, min_leaf: 1, max_features: 1 };
        let mut rows: Vec<usize> = (0..20).collect();
        let tree = grow_tree(&x, &y, &mut rows, &params, &mut RngStream::new(0));
        // exhaustive split-point oracle: the only zero-error cut lies in (6.0, 6.5)
        match tree.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(feature, 0);
                assert!(threshold > 6.0 && threshold < 6.5, "{threshold}");
            }
            _ => panic!("expected a split"),
        }
        for (v, &t) in vals.iter().zip(&y) {
            assert_eq!(tree.votes_artifact(&[*v]), t);
        }
    }

    #[test]
    fn min_leaf_and_purity_stop() {
        let x = Matrix::from_vec(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let y = [false, false, false, false];
        let params = TreeParams { max_depth: 5, min_leaf: 1, max_features: 1 };
        let mut rows: Vec<usize> = (0..4).collect();
        let t = grow_tree(&x, &y, &mut rows, &params, &mut RngStream::new(0));
        assert_eq!(t.nodes.len(), 1);
        let y = [false, true, false, true];
        let params = TreeParams { max_depth: 5, min_leaf: 3, max_features: 1 };
        let t = grow_tree(&x, &y, &mut rows, &params, &mut RngStream::new(0));
        assert_eq!(t.nodes.len(), 1);
    }

    #[test]
    fn forest_is_deterministic() {
        let mut rng = RngStream::new(5);
        let x = Matrix::from_vec(50, 3, (0..150).map(|_| rng.normal()).collect()).unwrap();
        let y: Vec<bool> = x.rows_iter().map(|r| r[0] + r[1] > 0.0).collect();
        let params = TreeParams { max_depth: 4, min_leaf: 1, max_features: 1 };
        let a = grow_forest(&x, &y, 10, &params, 9);
        let b = grow_forest(&x, &y, 10, &params, 9);
        assert_eq!(a, b);
    }
}
