//! Sequential minimal optimization for box- and equality-constrained
//! quadratic programs of the form
//!
//! ```text
//! min ½ αᵀQα + pᵀα   s.t.  yᵀα = Δ,  0 ≤ αᵢ ≤ Cᵢ,   yᵢ ∈ {−1, +1}
//! ```
//!
//! with `Qᵢⱼ = yᵢ yⱼ K(xᵢ, xⱼ)`. Working pairs are chosen by maximal violation
//! for the first index and second-order gain for the second. Both the C-SVM
//! dual and the ν one-class dual are instances.

use crate::numkit::{squared_distance, Matrix};
use crate::{Error, Result};

const TAU: f64 = 1e-12;
/// Above this many rows the kernel is evaluated on demand instead of stored.
const DENSE_LIMIT: usize = 5000;

/// Gaussian kernel rows over a fixed training matrix.
pub(crate) struct KernelRows<'a> {
    x: &'a Matrix,
    gamma: f64,
    dense: Option<Vec<f64>>,
    diag: Vec<f64>,
}

impl<'a> KernelRows<'a> {
    pub fn new(x: &'a Matrix, gamma: f64) -> Self {
        let n = x.n_rows();
        let dense = (n <= DENSE_LIMIT).then(|| {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                k[i * n + i] = 1.0;
                for j in 0..i {
                    let v = (-gamma * squared_distance(x.row(i), x.row(j))).exp();
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            k
        });
        Self {
            x,
            gamma,
            dense,
            diag: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.n_rows()
    }

    fn row_into(&self, i: usize, buf: &mut Vec<f64>) {
        let n = self.len();
        buf.clear();
        match &self.dense {
            Some(k) => buf.extend_from_slice(&k[i * n..(i + 1) * n]),
            None => {
                let xi = self.x.row(i);
                buf.extend(
                    (0..n).map(|j| (-self.gamma * squared_distance(xi, self.x.row(j))).exp()),
                );
            }
        }
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision offset: f(x) = Σ αᵢ yᵢ K(xᵢ, x) − rho.
    pub rho: f64,
    pub iterations: usize,
    /// Final maximal KKT violation m(α) − M(α).
    pub kkt_gap: f64,
    pub objective: f64,
}

pub(crate) struct Problem<'a> {
    pub kernel: &'a KernelRows<'a>,
    pub y: &'a [f64],
    pub p: &'a [f64],
    pub upper: &'a [f64],
    pub alpha0: Vec<f64>,
    pub eps: f64,
    pub max_iter: usize,
}

pub(crate) fn solve(problem: Problem<'_>) -> Result<SmoSolution> {
    let Problem {
        kernel,
        y,
        p,
        upper,
        alpha0,
        eps,
        max_iter,
    } = problem;
    let n = kernel.len();
    let mut alpha = alpha0;
    let qd = &kernel.diag;

    // G = Qα + p
    let mut grad = p.to_vec();
    let mut row = Vec::with_capacity(n);
    for i in 0..n {
        if alpha[i] != 0.0 {
            kernel.row_into(i, &mut row);
            for j in 0..n {
                grad[j] += alpha[i] * y[i] * y[j] * row[j];
            }
        }
    }

    let is_upper = |a: &[f64], t: usize| a[t] >= upper[t];
    let is_lower = |a: &[f64], t: usize| a[t] <= 0.0;
    let mut row_i = Vec::with_capacity(n);
    let mut row_j = Vec::with_capacity(n);
    let mut iterations = 0;
    let mut gap;

    loop {
        // first index: maximal violation over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let in_up = if y[t] > 0.0 { !is_upper(&alpha, t) } else { !is_lower(&alpha, t) };
            if in_up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        if i_sel != usize::MAX {
            kernel.row_into(i_sel, &mut row_i);
            let mut best = f64::INFINITY;
            for t in 0..n {
                let in_low = if y[t] > 0.0 { !is_lower(&alpha, t) } else { !is_upper(&alpha, t) };
                if !in_low {
                    continue;
                }
                let v = y[t] * grad[t];
                if v >= gmax2 {
                    gmax2 = v;
                }
                let grad_diff = gmax + v;
                if grad_diff > 0.0 {
                    let quad = qd[i_sel] + qd[t] - 2.0 * row_i[t];
                    let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best {
                        best = obj;
                        j_sel = t;
                    }
                }
            }
        }
        gap = gmax + gmax2;
        if i_sel == usize::MAX || j_sel == usize::MAX || gap < eps {
            break;
        }
        if iterations >= max_iter {
            return Err(Error::TrainingDivergence(format!(
                "SMO did not reach KKT tolerance {eps} within {max_iter} iterations (gap {gap:.3e})"
            )));
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        kernel.row_into(j, &mut row_j);
        let (ci, cj) = (upper[i], upper[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = row_i[j];
        if y[i] != y[j] {
            let quad = (qd[i] + qd[j] - 2.0 * kij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let quad = (qd[i] + qd[j] - 2.0 * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let di = (alpha[i] - old_i) * y[i];
        let dj = (alpha[j] - old_j) * y[j];
        for t in 0..n {
            grad[t] += y[t] * (row_i[t] * di + row_j[t] * dj);
        }
    }

    // offset from free variables, else the midpoint of the feasible range
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut n_free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if is_upper(&alpha, t) {
            if y[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if is_lower(&alpha, t) {
            if y[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 { sum_free / n_free as f64 } else { (ub + lb) / 2.0 };
    let objective = alpha
        .iter()
        .zip(&grad)
        .zip(p)
        .map(|((a, g), pi)| a * (g + pi))
        .sum::<f64>()
        / 2.0;
    Ok(SmoSolution {
        alpha,
        rho,
        iterations,
        kkt_gap: gap.max(0.0),
        objective,
    })
}

/// Iteration cap used by the detectors.
pub(crate) fn default_max_iter(n: usize) -> usize {
    (100 * n).max(1_000_000)
}
