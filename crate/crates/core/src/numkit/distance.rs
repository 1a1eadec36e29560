use crate::{Error, Result};

/// Squared Euclidean distance. Panics on length mismatch; callers on hot
/// paths validate shapes once up front.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "squared_distance: length mismatch");
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "euclidean_distance: lengths {} and {} differ",
            a.len(),
            b.len()
        )));
    }
    Ok(squared_distance(a, b).sqrt())
}

/// `exp(-gamma * |a - b|^2)`.
pub fn gaussian_kernel(a: &[f64], b: &[f64], gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("gaussian_kernel: gamma {gamma} must be > 0")));
    }
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "gaussian_kernel: lengths {} and {} differ",
            a.len(),
            b.len()
        )));
    }
    Ok((-gamma * squared_distance(a, b)).exp())
}
