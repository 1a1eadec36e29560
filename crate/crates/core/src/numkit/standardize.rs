use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::{Error, Result};

/// Lower bound applied to every per-feature scale.
pub const SCALE_FLOOR: f64 = 1e-8;

/// Per-column z-scoring fitted on a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    /// Column means and population standard deviations, the latter floored
    /// at [`SCALE_FLOOR`].
    pub fn fit(x: &Matrix) -> Result<Self> {
        if x.n_rows() == 0 {
            return Err(Error::invalid("cannot fit a standardizer on zero rows"));
        }
        let n = x.n_rows() as f64;
        let d = x.n_cols();
        let mut means = vec![0.0; d];
        for row in x.rows_iter() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for row in x.rows_iter() {
            for ((acc, v), m) in vars.iter_mut().zip(row).zip(&means) {
                *acc += (v - m) * (v - m);
            }
        }
        let scales = vars
            .into_iter()
            .map(|v| (v / n).sqrt().max(SCALE_FLOOR))
            .collect();
        Ok(Self { means, scales })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    fn check(&self, x: &Matrix) -> Result<()> {
        if x.n_cols() != self.means.len() {
            return Err(Error::invalid(format!(
                "standardizer fitted on {} columns, got {}",
                self.means.len(),
                x.n_cols()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.check(x)?;
        let mut out = x.clone();
        for i in 0..out.n_rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.means).zip(&self.scales) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    /// `mean + scale * z`, column by column.
    pub fn inverse(&self, z: &Matrix) -> Result<Matrix> {
        self.check(z)?;
        let mut out = z.clone();
        for i in 0..out.n_rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.means).zip(&self.scales) {
                *v = m + s * *v;
            }
        }
        Ok(out)
    }
}
