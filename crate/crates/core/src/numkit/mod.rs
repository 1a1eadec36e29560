//! Small deterministic numeric substrate shared by every other module.

mod distance;
mod matrix;
mod rng;
mod standardize;
mod stats;

pub use distance::{euclidean_distance, gaussian_kernel, squared_distance};
pub use matrix::Matrix;
pub use rng::RngStream;
pub use standardize::{Standardizer, SCALE_FLOOR};
pub use stats::{summary_stats, SummaryStats};
