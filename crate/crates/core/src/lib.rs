//! Motion artifact detection for wrist-measured electrodermal activity.
//!
//! The pipeline splits a recording into 5-second windows, computes
//! statistical and Haar-wavelet features over the skin-conductance and
//! accelerometer channels, and scores every window with one of eight
//! detectors (five supervised classifiers, three unsupervised anomaly
//! detectors). The [`eval`] module hosts the cross-validation, grid-search,
//! transfer and sensitivity experiments built on top.
//!
//! ```
//! use eda_artifacts::signal_io::{generate_synthetic_recording, SynthConfig};
//! use eda_artifacts::dsp::segment_windows;
//! use eda_artifacts::featurize::{assemble, FeatureSet};
//!
//! let config = SynthConfig { duration_s: 60.0, seed: 3, ..SynthConfig::default() };
//! let (recording, _intervals) = generate_synthetic_recording(&config).unwrap();
//! let windows = segment_windows(&recording).unwrap();
//! let features = assemble(&windows, FeatureSet::All).unwrap();
//! assert_eq!((features.n_rows(), features.n_cols()), (12, 120));
//! ```

pub mod detectors;
pub mod dsp;
mod error;
pub mod eval;
pub mod featurize;
pub mod numkit;
pub mod signal_io;

pub use error::{Error, Result};
