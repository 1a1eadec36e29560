//! Gaussian-kernel C-SVM and ν one-class SVM, both solved by [`super::smo`].

use serde::{Deserialize, Serialize};

use super::smo::{self, KernelRows, Problem, SmoSolution};
use crate::numkit::{squared_distance, Matrix};
use crate::{Error, Result};

pub const KKT_TOLERANCE: f64 = 1e-3;

/// Support vectors with their signed dual coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelExpansion {
    pub support_vectors: Matrix,
    pub coef: Vec<f64>,
    pub rho: f64,
    pub gamma: f64,
}

impl KernelExpansion {
    fn from_solution(x: &Matrix, signs: &[f64], sol: &SmoSolution, gamma: f64) -> Self {
        let idx: Vec<usize> = (0..x.n_rows()).filter(|&i| sol.alpha[i] > 0.0).collect();
        Self {
            support_vectors: x.select_rows(&idx),
            coef: idx.iter().map(|&i| sol.alpha[i] * signs[i]).collect(),
            rho: sol.rho,
            gamma,
        }
    }

    /// Σ coefᵢ K(svᵢ, x) − rho.
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .rows_iter()
            .zip(&self.coef)
            .map(|(sv, c)| c * (-self.gamma * squared_distance(sv, x)).exp())
            .sum::<f64>()
            - self.rho
    }
}

/// Solves the C-SVM dual. `y` holds ±1 labels; `weights` scales the box
/// bound per row (all ones without class weighting).
pub fn solve_csvm(x: &Matrix, y: &[f64], weights: &[f64], c: f64, gamma: f64) -> Result<SmoSolution> {
    if !(c > 0.0) || !(gamma > 0.0) {
        return Err(Error::invalid(format!("svm needs c > 0 and gamma > 0 (c={c}, gamma={gamma})")));
    }
    let n = x.n_rows();
    if y.len() != n || weights.len() != n {
        return Err(Error::invalid("svm: label count differs from rows"));
    }
    let kernel = KernelRows::new(x, gamma);
    let p = vec![-1.0; n];
    let upper: Vec<f64> = weights.iter().map(|w| c * w).collect();
    smo::solve(Problem {
        kernel: &kernel,
        y,
        p: &p,
        upper: &upper,
        alpha0: vec![0.0; n],
        eps: KKT_TOLERANCE,
        max_iter: smo::default_max_iter(n),
    })
}

pub fn fit_csvm(x: &Matrix, y: &[f64], weights: &[f64], c: f64, gamma: f64) -> Result<KernelExpansion> {
    let sol = solve_csvm(x, y, weights, c, gamma)?;
    Ok(KernelExpansion::from_solution(x, y, &sol, gamma))
}

/// Solves the ν one-class dual in the scaling `0 ≤ αᵢ ≤ 1`, `Σ αᵢ = νn`.
pub fn solve_one_class(x: &Matrix, nu: f64, gamma: f64) -> Result<SmoSolution> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::invalid(format!("one-class svm: nu {nu} outside (0, 1]")));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("one-class svm: gamma {gamma} must be > 0")));
    }
    let n = x.n_rows();
    if n < 2 {
        return Err(Error::invalid("one-class svm needs at least 2 rows"));
    }
    // feasible start: the first ⌊νn⌋ at the bound, the remainder on the next
    let total = nu * n as f64;
    let full = (total.floor() as usize).min(n);
    let mut alpha0 = vec![0.0; n];
    alpha0[..full].iter_mut().for_each(|a| *a = 1.0);
    if full < n {
        alpha0[full] = total - full as f64;
    }
    let kernel = KernelRows::new(x, gamma);
    let y = vec![1.0; n];
    let p = vec![0.0; n];
    let upper = vec![1.0; n];
    smo::solve(Problem {
        kernel: &kernel,
        y: &y,
        p: &p,
        upper: &upper,
        alpha0,
        eps: KKT_TOLERANCE,
        max_iter: smo::default_max_iter(n),
    })
}

pub fn fit_one_class(x: &Matrix, nu: f64, gamma: f64) -> Result<KernelExpansion> {
    let sol = solve_one_class(x, nu, gamma)?;
    Ok(KernelExpansion::from_solution(x, &vec![1.0; x.n_rows()], &sol, gamma))
}
