use std::path::Path;

use crate::dsp::{segment_windows, Window};
use crate::featurize::{assemble, feature_names, FeatureMatrix, FeatureSet};
use crate::numkit::Matrix;
use crate::signal_io::{read_labels_csv, read_manifest, read_recording_csv, SyntheticSegment, WindowLabel};
use crate::{Error, Result};

/// Labeled windows of one corpus, featurized once with the full registry.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub id: String,
    features: FeatureMatrix,
    labels: Vec<WindowLabel>,
}

/// Reads every recording of a manifest and cuts it into windows. With
/// `with_labels`, each window carries the expert majority label.
pub fn load_windows(manifest: impl AsRef<Path>, with_labels: bool) -> Result<Vec<Window>> {
    let manifest = manifest.as_ref();
    let dir = manifest.parent().unwrap_or_else(|| Path::new("."));
    let mut out = Vec::new();
    for entry in read_manifest(manifest)? {
        let mut rec = read_recording_csv(dir.join(&entry.file))?;
        rec.subject_id = entry.subject_id.clone();
        rec.segment_id = entry.segment_id.clone();
        let mut windows = segment_windows(&rec)?;
        if with_labels {
            let labels = read_labels_csv(dir.join(entry.labels_file()), windows.len())?.fused();
            for (w, l) in windows.iter_mut().zip(labels) {
                w.label = Some(l);
            }
        }
        out.extend(windows);
    }
    Ok(out)
}

fn manifest_id(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if stem == "manifest" {
        if let Some(parent) = path.parent().and_then(Path::file_name) {
            return parent.to_string_lossy().into_owned();
        }
    }
    stem
}

impl Dataset {
    pub fn from_features(id: impl Into<String>, features: FeatureMatrix, labels: Vec<WindowLabel>) -> Result<Self> {
        if labels.len() != features.n_rows() {
            return Err(Error::invalid(format!(
                "{} labels for {} feature rows",
                labels.len(),
                features.n_rows()
            )));
        }
        Ok(Self {
            id: id.into(),
            features,
            labels,
        })
    }

    pub fn from_windows(id: impl Into<String>, windows: &[Window]) -> Result<Self> {
        let labels = windows
            .iter()
            .map(|w| w.label)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::invalid("every window needs a label"))?;
        Self::from_features(id, assemble(windows, FeatureSet::All)?, labels)
    }

    pub fn from_synthetic(id: impl Into<String>, segments: &[SyntheticSegment]) -> Result<Self> {
        let mut windows = Vec::new();
        for seg in segments {
            let mut w = segment_windows(&seg.recording)?;
            for (w, l) in w.iter_mut().zip(seg.labels.fused()) {
                w.label = Some(l);
            }
            windows.extend(w);
        }
        Self::from_windows(id, &windows)
    }

    /// Id is the manifest's file stem, or its directory name for a file
    /// called `manifest.json`.
    pub fn load(manifest: impl AsRef<Path>) -> Result<Self> {
        let manifest = manifest.as_ref();
        Self::from_windows(manifest_id(manifest), &load_windows(manifest, true)?)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[WindowLabel] {
        &self.labels
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn artifact_fraction(&self) -> f64 {
        self.labels.iter().filter(|l| l.is_artifact()).count() as f64 / self.n_rows().max(1) as f64
    }

    /// The columns of one feature set, checked against the registry.
    pub fn view(&self, set: FeatureSet) -> Result<FeatureMatrix> {
        self.features.select_named(&feature_names(set))
    }

    pub fn matrix(&self, set: FeatureSet) -> Result<Matrix> {
        Ok(self.view(set)?.into_values())
    }
}
