//! Recording and label ingestion, expert-label fusion, and the seeded
//! synthetic generator used by the tests and the `synth` command.

mod labels;
mod manifest;
mod recording;
mod synth;

pub use labels::{majority_label, read_labels_csv, write_labels_csv, ExpertLabels, WindowLabel};
pub use manifest::{read_manifest, write_manifest, ManifestEntry};
pub use recording::{read_recording_csv, write_recording_csv, Recording, CANONICAL_RATE_HZ};
pub use synth::{
    generate_synthetic_dataset, generate_synthetic_recording, window_labels, MaInterval, MaKind,
    SynthConfig, SynthDatasetConfig, SyntheticSegment, SCR_RISE_RANGE_S,
};
