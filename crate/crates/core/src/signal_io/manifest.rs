use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One recording of a dataset manifest. Paths are relative to the
/// manifest's directory. `labels` defaults to `<file stem>.labels.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub subject_id: String,
    pub segment_id: String,
    #[serde(default)]
    pub activity_tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
}

impl ManifestEntry {
    pub fn labels_file(&self) -> String {
        self.labels.clone().unwrap_or_else(|| {
            let stem = self.file.strip_suffix(".csv").unwrap_or(&self.file);
            format!("{stem}.labels.csv")
        })
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text)?;
    if entries.is_empty() {
        return Err(Error::invalid(format!("{}: manifest lists no recordings", path.display())));
    }
    Ok(entries)
}

pub fn write_manifest(entries: &[ManifestEntry], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(entries)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
