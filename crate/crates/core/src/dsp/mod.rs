//! Windowing and per-window derived signals.

mod derivative;
mod haar;
mod window;

pub use derivative::{first_derivative, second_derivative};
pub use haar::{haar_dwt, haar_inverse, DwtDetails, DWT_LEVELS};
pub use window::{acc_magnitude, segment_windows, Window, WINDOW_SECONDS};
