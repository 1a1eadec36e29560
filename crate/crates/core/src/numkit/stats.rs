use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mean, population standard deviation, maximum and minimum of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub min: f64,
}

impl SummaryStats {
    /// The statistics in registry order: mean, std, max, min.
    pub fn to_array(self) -> [f64; 4] {
        [self.mean, self.std, self.max, self.min]
    }
}

/// Computes the four window statistics. The standard deviation divides by
/// `n`, not `n - 1`.
pub fn summary_stats(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::invalid("summary_stats of an empty slice"));
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "summary_stats: non-finite value at index {pos}"
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    // Rounding can push the mean a hair outside [min, max] for constant input.
    let mean = mean.clamp(min, max);
    Ok(SummaryStats {
        mean,
        std: var.sqrt(),
        max,
        min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_input() {
        let s = summary_stats(&[5.0; 4]).unwrap();
        assert_eq!(s, SummaryStats { mean: 5.0, std: 0.0, max: 5.0, min: 5.0 });
    }

    #[test]
    fn one_to_four() {
        let s = summary_stats(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        // population variance: (2.25 + 0.25 + 0.25 + 2.25) / 4 = 1.25
        assert_eq!(s.mean, 2.5);
        assert!((s.std - 1.25f64.sqrt()).abs() < 1e-15);
        assert!((s.std - 1.1180).abs() < 1e-4);
        assert_eq!((s.max, s.min), (4.0, 1.0));
    }

    #[test]
    fn symmetric_pair() {
        let s = summary_stats(&[-1.0, 1.0]).unwrap();
        assert_eq!(s, SummaryStats { mean: 0.0, std: 1.0, max: 1.0, min: -1.0 });
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(summary_stats(&[]), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            summary_stats(&[1.0, f64::NAN]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(summary_stats(&[f64::INFINITY]).is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut v in prop::collection::vec(-1e3f64..1e3, 1..60), seed in any::<u64>()) {
            let a = summary_stats(&v).unwrap();
            crate::numkit::RngStream::new(seed).shuffle(&mut v);
            let b = summary_stats(&v).unwrap();
            prop_assert_eq!(a.max, b.max);
            prop_assert_eq!(a.min, b.min);
            prop_assert!((a.mean - b.mean).abs() <= 1e-9);
            prop_assert!((a.std - b.std).abs() <= 1e-9);
        }

        #[test]
        fn ordering_invariant(v in prop::collection::vec(-1e6f64..1e6, 1..60)) {
            let s = summary_stats(&v).unwrap();
            prop_assert!(s.min <= s.mean && s.mean <= s.max);
            prop_assert!(s.std >= 0.0);
        }
    }
}
