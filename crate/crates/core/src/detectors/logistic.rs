//! L2-regularized logistic regression trained by full-batch gradient
//! descent with a backtracking step size.

use serde::{Deserialize, Serialize};

use crate::numkit::Matrix;
use crate::{Error, Result};

pub const GRADIENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LogisticModel {
    pub fn zeros(d: usize) -> Self {
        Self {
            weights: vec![0.0; d],
            bias: 0.0,
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Artifact probability.
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    fn pack(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.bias);
        p
    }

    fn unpack(p: &[f64]) -> Self {
        let (w, b) = p.split_at(p.len() - 1);
        Self {
            weights: w.to_vec(),
            bias: b[0],
        }
    }
}

/// Objective and gradient over the packed parameters `[w..., b]`:
/// `Σ sᵢ (log(1 + e^zᵢ) − yᵢ zᵢ) / Σ sᵢ + λ/2 |w|²` with per-row weights `sᵢ`.
pub fn loss_and_gradient(
    x: &Matrix,
    y: &[f64],
    sample_weights: &[f64],
    params: &[f64],
    l2_lambda: f64,
) -> (f64, Vec<f64>) {
    let d = x.n_cols();
    let model = LogisticModel::unpack(params);
    let total: f64 = sample_weights.iter().sum();
    let mut grad = vec![0.0; d + 1];
    let mut loss = 0.0;
    for ((row, &yi), &si) in x.rows_iter().zip(y).zip(sample_weights) {
        let z = model.logit(row);
        loss += si * (softplus(z) - yi * z);
        let r = si * (sigmoid(z) - yi);
        for (g, v) in grad.iter_mut().zip(row) {
            *g += r * v;
        }
        grad[d] += r;
    }
    loss /= total;
    grad.iter_mut().for_each(|g| *g /= total);
    for (g, w) in grad.iter_mut().zip(&model.weights) {
        *g += l2_lambda * w;
    }
    loss += 0.5 * l2_lambda * model.weights.iter().map(|w| w * w).sum::<f64>();
    (loss, grad)
}

pub fn fit(
    x: &Matrix,
    y: &[f64],
    sample_weights: &[f64],
    l2_lambda: f64,
    max_epochs: usize,
) -> Result<LogisticModel> {
    if !(l2_lambda >= 0.0) {
        return Err(Error::invalid(format!("l2_lambda {l2_lambda} must be >= 0")));
    }
    let mut params = LogisticModel::zeros(x.n_cols()).pack();
    let (mut loss, mut grad) = loss_and_gradient(x, y, sample_weights, &params, l2_lambda);
    let mut step = 1.0;
    for _ in 0..max_epochs {
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2.sqrt() <= GRADIENT_TOLERANCE {
            break;
        }
        // Armijo backtracking; the step is allowed to grow back each epoch.
        step *= 2.0;
        loop {
            let trial: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
            let (tl, tg) = loss_and_gradient(x, y, sample_weights, &trial, l2_lambda);
            if tl <= loss - 0.5 * step * gnorm2 {
                params = trial;
                loss = tl;
                grad = tg;
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                return Ok(LogisticModel::unpack(&params));
            }
        }
        if !loss.is_finite() {
            return Err(Error::TrainingDivergence("logistic loss is not finite".into()));
        }
    }
    Ok(LogisticModel::unpack(&params))
}
