//! Brute-force nearest neighbours over stored (standardized) rows. Distance
//! ties are broken by the lower training-row index.

use std::cmp::Ordering;

use crate::numkit::{squared_distance, Matrix};

/// `(squared distance, training index)` of the `k` nearest rows, nearest
/// first.
pub fn nearest(train: &Matrix, query: &[f64], k: usize, buf: &mut Vec<(f64, usize)>) {
    buf.clear();
    buf.extend(
        train
            .rows_iter()
            .enumerate()
            .map(|(i, r)| (squared_distance(r, query), i)),
    );
    let cmp = |a: &(f64, usize), b: &(f64, usize)| {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
    };
    if k < buf.len() {
        buf.select_nth_unstable_by(k - 1, cmp);
        buf.truncate(k);
    }
    buf.sort_unstable_by(cmp);
}

/// Distance from `query` to its k-th nearest training row.
pub fn kth_distance(train: &Matrix, query: &[f64], k: usize, buf: &mut Vec<(f64, usize)>) -> f64 {
    nearest(train, query, k, buf);
    buf[k - 1].0.sqrt()
}

/// Fraction of the `k` nearest training rows labeled artifact.
pub fn vote_fraction(
    train: &Matrix,
    labels: &[bool],
    query: &[f64],
    k: usize,
    buf: &mut Vec<(f64, usize)>,
) -> f64 {
    nearest(train, query, k, buf);
    buf.iter().filter(|&&(_, i)| labels[i]).count() as f64 / k as f64
}
