use crate::signal_io::{Recording, WindowLabel};
use crate::{Error, Result};

pub const WINDOW_SECONDS: f64 = 5.0;

/// One non-overlapping 5-second slice of every channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub subject_id: String,
    pub segment_id: String,
    pub window_index: usize,
    pub sampling_rate_hz: f64,
    pub eda_us: Vec<f64>,
    pub acc_x_g: Vec<f64>,
    pub acc_y_g: Vec<f64>,
    pub acc_z_g: Vec<f64>,
    pub label: Option<WindowLabel>,
}

impl Window {
    pub fn len(&self) -> usize {
        self.eda_us.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eda_us.is_empty()
    }

    pub fn acc_axes(&self) -> [&[f64]; 3] {
        [&self.acc_x_g, &self.acc_y_g, &self.acc_z_g]
    }
}

/// Splits a recording into `floor(n / (5 * fs))` consecutive windows; the
/// trailing remainder is dropped. Windows are unlabeled.
pub fn segment_windows(recording: &Recording) -> Result<Vec<Window>> {
    recording.validate()?;
    let spw = (WINDOW_SECONDS * recording.sampling_rate_hz).round() as usize;
    if spw == 0 || recording.len() < spw {
        return Err(Error::invalid(format!(
            "recording {}/{} has {} samples, fewer than one {WINDOW_SECONDS} s window",
            recording.subject_id,
            recording.segment_id,
            recording.len()
        )));
    }
    let n_windows = recording.len() / spw;
    Ok((0..n_windows)
        .map(|w| {
            let r = w * spw..(w + 1) * spw;
            Window {
                subject_id: recording.subject_id.clone(),
                segment_id: recording.segment_id.clone(),
                window_index: w,
                sampling_rate_hz: recording.sampling_rate_hz,
                eda_us: recording.eda_us[r.clone()].to_vec(),
                acc_x_g: recording.acc_x_g[r.clone()].to_vec(),
                acc_y_g: recording.acc_y_g[r.clone()].to_vec(),
                acc_z_g: recording.acc_z_g[r].to_vec(),
                label: None,
            }
        })
        .collect())
}

/// Per-sample `sqrt(x² + y² + z²)`.
pub fn acc_magnitude(x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() || x.len() != z.len() {
        return Err(Error::invalid("acc_magnitude: axis lengths differ"));
    }
    Ok(x.iter()
        .zip(y)
        .zip(z)
        .map(|((a, b), c)| (a * a + b * b + c * c).sqrt())
        .collect())
}
