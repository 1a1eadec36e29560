use crate::{Error, Result};

/// Forward difference scaled by the sampling rate: `(x[i+1] - x[i]) * fs`.
pub fn first_derivative(samples: &[f64], fs: f64) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::invalid(format!(
            "first derivative needs >= 2 samples, got {}",
            samples.len()
        )));
    }
    Ok(samples.windows(2).map(|w| (w[1] - w[0]) * fs).collect())
}

/// The first derivative applied twice; length `n - 2`.
pub fn second_derivative(samples: &[f64], fs: f64) -> Result<Vec<f64>> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!(
            "second derivative needs >= 3 samples, got {}",
            samples.len()
        )));
    }
    first_derivative(&first_derivative(samples, fs)?, fs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::RngStream;

    #[test]
    fn constant_and_ramp() {
        assert!(first_derivative(&[3.0; 10], 8.0).unwrap().iter().all(|&d| d == 0.0));
        let ramp: Vec<f64> = (0..40).map(|i| i as f64 / 8.0).collect();
        let d = first_derivative(&ramp, 8.0).unwrap();
        assert_eq!(d.len(), 39);
        assert!(d.iter().all(|&v| v == 1.0));
        assert_eq!(second_derivative(&ramp, 8.0).unwrap().len(), 38);
    }

    #[test]
    fn too_short() {
        assert!(first_derivative(&[1.0], 8.0).is_err());
        assert!(second_derivative(&[1.0, 2.0], 8.0).is_err());
    }

    #[test]
    fn second_derivative_closed_form() {
        let mut rng = RngStream::new(21);
        for _ in 0..100 {
            let x: Vec<f64> = (0..40).map(|_| rng.uniform(0.0, 1.0)).collect();
            let d2 = second_derivative(&x, 8.0).unwrap();
            for i in 0..38 {
                let oracle = (x[i + 2] - 2.0 * x[i + 1] + x[i]) * 64.0;
                assert!((d2[i] - oracle).abs() <= 1e-12);
            }
            let twice = first_derivative(&first_derivative(&x, 8.0).unwrap(), 8.0).unwrap();
            assert_eq!(twice, d2);
        }
    }
}
