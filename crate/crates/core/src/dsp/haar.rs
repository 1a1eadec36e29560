use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of cascade levels; at 8 Hz these are the 4, 2 and 1 Hz scales.
pub const DWT_LEVELS: usize = 3;

/// Detail coefficients of a three-level orthonormal Haar cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwtDetails {
    /// 4 Hz scale (n/2 coefficients).
    pub level1: Vec<f64>,
    /// 2 Hz scale (n/4).
    pub level2: Vec<f64>,
    /// 1 Hz scale (n/8).
    pub level3: Vec<f64>,
    /// Level-3 approximation, kept for reconstruction and energy checks.
    pub approx3: Vec<f64>,
}

impl DwtDetails {
    pub fn levels(&self) -> [&[f64]; DWT_LEVELS] {
        [&self.level1, &self.level2, &self.level3]
    }

    pub fn energy(&self) -> f64 {
        self.levels()
            .iter()
            .chain(std::iter::once(&self.approx3.as_slice()))
            .flat_map(|l| l.iter())
            .map(|v| v * v)
            .sum()
    }
}

fn haar_step(a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    a.chunks_exact(2)
        .map(|p| ((p[0] + p[1]) * FRAC_1_SQRT_2, (p[0] - p[1]) * FRAC_1_SQRT_2))
        .unzip()
}

/// Three-level Haar transform with `d[i] = (a[2i] - a[2i+1]) / √2` and
/// `a'[i] = (a[2i] + a[2i+1]) / √2`. Length must be a positive multiple of 8.
pub fn haar_dwt(samples: &[f64]) -> Result<DwtDetails> {
    if samples.is_empty() || samples.len() % (1 << DWT_LEVELS) != 0 {
        return Err(Error::invalid(format!(
            "haar_dwt needs a positive multiple of 8 samples, got {}",
            samples.len()
        )));
    }
    let (a1, level1) = haar_step(samples);
    let (a2, level2) = haar_step(&a1);
    let (approx3, level3) = haar_step(&a2);
    Ok(DwtDetails {
        level1,
        level2,
        level3,
        approx3,
    })
}

fn inverse_step(approx: &[f64], detail: &[f64]) -> Vec<f64> {
    approx
        .iter()
        .zip(detail)
        .flat_map(|(a, d)| [(a + d) * FRAC_1_SQRT_2, (a - d) * FRAC_1_SQRT_2])
        .collect()
}

pub fn haar_inverse(dwt: &DwtDetails) -> Result<Vec<f64>> {
    let n3 = dwt.approx3.len();
    if dwt.level3.len() != n3 || dwt.level2.len() != 2 * n3 || dwt.level1.len() != 4 * n3 {
        return Err(Error::invalid("inconsistent DWT level lengths"));
    }
    let a2 = inverse_step(&dwt.approx3, &dwt.level3);
    let a1 = inverse_step(&a2, &dwt.level2);
    Ok(inverse_step(&a1, &dwt.level1))
}
