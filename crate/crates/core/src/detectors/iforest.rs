//! Isolation forest: random axis-aligned splits on subsamples; anomalies
//! isolate in fewer splits.

use serde::{Deserialize, Serialize};

use crate::numkit::{Matrix, RngStream};

const EULER_GAMMA: f64 = 0.577_215_664_9;

/// Harmonic number, summed exactly for small arguments.
pub fn harmonic(i: usize) -> f64 {
    if i < 1000 {
        (1..=i).map(|k| 1.0 / k as f64).sum()
    } else {
        let x = i as f64;
        x.ln() + EULER_GAMMA + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x)
    }
}

/// Average unsuccessful-search path length in a binary search tree of `n`
/// nodes: `c(n) = 2 H(n − 1) − 2 (n − 1) / n`, with `c(1) = c(0) = 0`.
pub fn average_path_length(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let m = (n - 1) as f64;
    2.0 * harmonic(n - 1) - 2.0 * m / n as f64
}

/// `2^(−E[h] / c(ψ))`.
pub fn anomaly_score(mean_path: f64, subsample: usize) -> f64 {
    2f64.powf(-mean_path / average_path_length(subsample))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum INode {
    External {
        size: usize,
    },
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ITree {
    pub nodes: Vec<INode>,
}

impl ITree {
    pub fn path_length(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        let mut depth = 0.0;
        loop {
            match &self.nodes[at] {
                INode::External { size } => return depth + average_path_length(*size),
                INode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] < *threshold { *left } else { *right };
                    depth += 1.0;
                }
            }
        }
    }
}

fn grow(x: &Matrix, rows: &mut [usize], depth: usize, limit: usize, rng: &mut RngStream, nodes: &mut Vec<INode>) -> usize {
    let id = nodes.len();
    nodes.push(INode::External { size: rows.len() });
    if depth >= limit || rows.len() <= 1 {
        return id;
    }
    // features that still vary inside this node
    let mut ranges = Vec::new();
    for f in 0..x.n_cols() {
        let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let v = x.get(i, f);
            (lo.min(v), hi.max(v))
        });
        if hi > lo {
            ranges.push((f, lo, hi));
        }
    }
    if ranges.is_empty() {
        return id;
    }
    let (feature, lo, hi) = ranges[rng.index(ranges.len())];
    let mut threshold = rng.uniform(lo, hi);
    if threshold <= lo {
        // keep both sides non-empty
        threshold = 0.5 * (lo + hi);
    }
    let mut split = 0;
    for k in 0..rows.len() {
        if x.get(rows[k], feature) < threshold {
            rows.swap(split, k);
            split += 1;
        }
    }
    let (l, r) = rows.split_at_mut(split);
    let left = grow(x, l, depth + 1, limit, rng, nodes);
    let right = grow(x, r, depth + 1, limit, rng, nodes);
    nodes[id] = INode::Internal {
        feature,
        threshold,
        left,
        right,
    };
    id
}

/// Grows `n_trees` trees on subsamples of `psi` rows drawn without
/// replacement, each to height `⌈log₂ ψ⌉`.
pub fn grow_forest(x: &Matrix, n_trees: usize, psi: usize, seed: u64) -> Vec<ITree> {
    let limit = (psi as f64).log2().ceil() as usize;
    (0..n_trees)
        .map(|t| {
            let mut rng = RngStream::derived(seed, t as u64 + 1);
            let mut rows = rng.sample_without_replacement(x.n_rows(), psi);
            let mut nodes = Vec::new();
            grow(x, &mut rows, 0, limit, &mut rng, &mut nodes);
            ITree { nodes }
        })
        .collect()
}

pub fn mean_path_length(trees: &[ITree], x: &[f64]) -> f64 {
    trees.iter().map(|t| t.path_length(x)).sum::<f64>() / trees.len() as f64
}
