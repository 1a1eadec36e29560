//! Multi-layer perceptron: ReLU hidden layers, a sigmoid output unit,
//! cross-entropy loss, mini-batch gradient descent.

use serde::{Deserialize, Serialize};

use super::logistic::{sigmoid, softplus};
use crate::numkit::{Matrix, RngStream};
use crate::{Error, Result};

pub const BATCH_SIZE: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    /// `outputs × inputs`
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Dense {
    fn forward(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.weights.rows_iter().zip(&self.bias).map(|(w, b)| {
            b + w.iter().zip(input).map(|(a, x)| a * x).sum::<f64>()
        }));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// Hidden layers followed by the single-unit output layer.
    pub layers: Vec<Dense>,
}

impl MlpModel {
    /// He-initialized hidden layers, zero biases.
    pub fn init(inputs: usize, hidden_layers: usize, width: usize, rng: &mut RngStream) -> Self {
        let mut layers = Vec::new();
        let mut fan_in = inputs;
        for l in 0..=hidden_layers {
            let out = if l == hidden_layers { 1 } else { width };
            let scale = if l == hidden_layers { (1.0 / fan_in as f64).sqrt() } else { (2.0 / fan_in as f64).sqrt() };
            let w = (0..out * fan_in).map(|_| scale * rng.normal()).collect();
            layers.push(Dense {
                weights: Matrix::from_vec(out, fan_in, w).expect("shape"),
                bias: vec![0.0; out],
            });
            fan_in = out;
        }
        Self { layers }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Dense {
                    weights: Matrix::zeros(l.weights.n_rows(), l.weights.n_cols()),
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let mut k = 0;
        for l in &mut self.layers {
            let (r, c) = (l.weights.n_rows(), l.weights.n_cols());
            l.weights = Matrix::from_vec(r, c, flat[k..k + r * c].to_vec()).expect("shape");
            k += r * c;
            l.bias.copy_from_slice(&flat[k..k + r]);
            k += r;
        }
    }

    fn output_logit(&self, x: &[f64], acts: &mut Vec<Vec<f64>>) -> f64 {
        acts.resize(self.layers.len() + 1, Vec::new());
        acts[0].clear();
        acts[0].extend_from_slice(x);
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let (head, tail) = acts.split_at_mut(l + 1);
            layer.forward(&head[l], &mut tail[0]);
            if l < last {
                tail[0].iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        acts[last + 1][0]
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let mut acts = Vec::new();
        sigmoid(self.output_logit(x, &mut acts))
    }
}

/// Weighted mean cross-entropy over `rows` plus `λ/2 Σ |W|²` (biases are
/// not penalized), with its backpropagated gradient.
pub fn loss_and_gradient(
    model: &MlpModel,
    x: &Matrix,
    y: &[f64],
    sample_weights: &[f64],
    rows: &[usize],
    l2_lambda: f64,
) -> (f64, MlpModel) {
    let mut grad = model.zeros_like();
    let mut acts = Vec::new();
    let total: f64 = rows.iter().map(|&i| sample_weights[i]).sum();
    let mut loss = 0.0;
    let n_layers = model.layers.len();
    let mut delta: Vec<f64> = Vec::new();
    let mut next: Vec<f64> = Vec::new();
    for &i in rows {
        let z = model.output_logit(x.row(i), &mut acts);
        let s = sample_weights[i] / total;
        loss += s * (softplus(z) - y[i] * z);
        delta.clear();
        delta.push(s * (sigmoid(z) - y[i]));
        for l in (0..n_layers).rev() {
            let input = &acts[l];
            let g = &mut grad.layers[l];
            for (o, &d) in delta.iter().enumerate() {
                g.bias[o] += d;
                for (gw, a) in g.weights.row_mut(o).iter_mut().zip(input) {
                    *gw += d * a;
                }
            }
            if l > 0 {
                let w = &model.layers[l].weights;
                next.clear();
                next.resize(w.n_cols(), 0.0);
                for (o, &d) in delta.iter().enumerate() {
                    for (nv, wv) in next.iter_mut().zip(w.row(o)) {
                        *nv += d * wv;
                    }
                }
                // ReLU derivative from the stored post-activation
                for (nv, a) in next.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *nv = 0.0;
                    }
                }
                std::mem::swap(&mut delta, &mut next);
            }
        }
    }
    if l2_lambda > 0.0 {
        for (layer, g) in model.layers.iter().zip(&mut grad.layers) {
            let w = layer.weights.as_slice();
            loss += 0.5 * l2_lambda * w.iter().map(|v| v * v).sum::<f64>();
            for r in 0..g.weights.n_rows() {
                for (gw, wv) in g.weights.row_mut(r).iter_mut().zip(layer.weights.row(r)) {
                    *gw += l2_lambda * wv;
                }
            }
        }
    }
    (loss, grad)
}

pub struct MlpTraining {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
}

pub fn fit(
    x: &Matrix,
    y: &[f64],
    sample_weights: &[f64],
    cfg: &MlpTraining,
    seed: u64,
) -> Result<MlpModel> {
    if !(1..=2).contains(&cfg.hidden_layers) {
        return Err(Error::invalid(format!(
            "mlp supports 1 or 2 hidden layers, got {}",
            cfg.hidden_layers
        )));
    }
    if cfg.hidden_width == 0 || !(cfg.learning_rate > 0.0) || cfg.epochs == 0 {
        return Err(Error::invalid("mlp needs width, learning rate and epochs > 0"));
    }
    let mut rng = RngStream::new(seed);
    let mut model = MlpModel::init(x.n_cols(), cfg.hidden_layers, cfg.hidden_width, &mut rng);
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    let mut flat = model.to_flat();
    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(BATCH_SIZE) {
            let (loss, grad) = loss_and_gradient(&model, x, y, sample_weights, batch, cfg.l2_lambda);
            if !loss.is_finite() {
                return Err(Error::TrainingDivergence("mlp loss is not finite".into()));
            }
            epoch_loss += loss;
            for (p, g) in flat.iter_mut().zip(grad.to_flat()) {
                *p -= cfg.learning_rate * g;
            }
            model.set_flat(&flat);
        }
        if !epoch_loss.is_finite() || flat.iter().any(|p| !p.is_finite()) {
            return Err(Error::TrainingDivergence("mlp parameters are not finite".into()));
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_scores_half() {
        let mut rng = RngStream::new(0);
        let m = MlpModel::init(3, 2, 5, &mut rng).zeros_like();
        assert_eq!(m.score(&[1.0, 2.0, 3.0]), 0.5);
        assert_eq!(m.score(&[-7.0, 0.0, 1.0]), 0.5);
    }

    fn xor(seed: u64, n: usize) -> (Matrix, Vec<f64>) {
        let mut rng = RngStream::new(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let (a, b) = ((i % 2) as f64, ((i / 2) % 2) as f64);
            rows.push([2.0 * a - 1.0 + 0.15 * rng.normal(), 2.0 * b - 1.0 + 0.15 * rng.normal()]);
            y.push(if a != b { 1.0 } else { 0.0 });
        }
        (Matrix::from_rows(&rows, 2).unwrap(), y)
    }

    #[test]
    fn learns_xor() {
        let (x, y) = xor(1, 200);
        let cfg = MlpTraining { hidden_layers: 1, hidden_width: 8, learning_rate: 0.1, epochs: 300, l2_lambda: 0.0 };
        let m = fit(&x, &y, &vec![1.0; 200], &cfg, 3).unwrap();
        let correct = x
            .rows_iter()
            .zip(&y)
            .filter(|(r, &t)| (m.score(r) > 0.5) == (t > 0.5))
            .count();
        assert!(correct as f64 / 200.0 >= 0.95, "accuracy {}", correct as f64 / 200.0);
    }

    #[test]
    fn finite_difference_gradient() {
        let mut rng = RngStream::new(44);
        for layers in [1, 2] {
            let (x, y) = xor(layers as u64, 12);
            let w: Vec<f64> = (0..12).map(|_| rng.uniform(0.5, 1.5)).collect();
            let mut m = MlpModel::init(2, layers, 4, &mut rng);
            let mut flat = m.to_flat();
            flat.iter_mut().for_each(|p| *p += 0.1 * rng.normal());
            m.set_flat(&flat);
            let rows: Vec<usize> = (0..12).collect();
            let (_, g) = loss_and_gradient(&m, &x, &y, &w, &rows, 0.05);
            let g = g.to_flat();
            let h = 1e-6;
            let mut fd = Vec::new();
            for k in 0..flat.len() {
                let mut p = flat.clone();
                p[k] += h;
                let mut up = m.clone();
                up.set_flat(&p);
                p[k] -= 2.0 * h;
                let mut dn = m.clone();
                dn.set_flat(&p);
                let lu = loss_and_gradient(&up, &x, &y, &w, &rows, 0.05).0;
                let ld = loss_and_gradient(&dn, &x, &y, &w, &rows, 0.05).0;
                fd.push((lu - ld) / (2.0 * h));
            }
            let num: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
            assert!(num / den <= 1e-4, "relative error {}", num / den);
        }
    }

    #[test]
    fn rejects_three_hidden_layers() {
        let (x, y) = xor(0, 8);
        let cfg = MlpTraining { hidden_layers: 3, hidden_width: 4, learning_rate: 0.1, epochs: 1, l2_lambda: 0.0 };
        assert!(fit(&x, &y, &[1.0; 8], &cfg, 0).is_err());
    }
}
