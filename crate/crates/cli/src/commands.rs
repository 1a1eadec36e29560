use std::fmt::Write as _;
use std::path::Path;

use eda_artifacts::detectors::{fit, Algorithm, DetectorSpec, Hyperparameters, TrainedDetector};
use eda_artifacts::eval::Dataset;
use eda_artifacts::featurize::{assemble, read_feature_csv, write_feature_csv, FeatureSet};
use eda_artifacts::signal_io::{
    generate_synthetic_dataset, write_labels_csv, write_manifest, write_recording_csv, ManifestEntry,
    SynthDatasetConfig,
};
use eda_artifacts::{eval, Error, Result};

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

pub fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| io_error(path, e))
}

pub fn synth(config: Option<&Path>, seed: u64, out: &Path) -> Result<()> {
    let mut cfg: SynthDatasetConfig = match config {
        Some(p) => read_json(p)?,
        None => SynthDatasetConfig::default(),
    };
    cfg.seed = seed;
    let segments = generate_synthetic_dataset(&cfg)?;
    create_dir(out)?;
    let mut entries = Vec::with_capacity(segments.len());
    let mut artifact_windows = 0;
    let mut windows = 0;
    for seg in &segments {
        let file = format!("{}.csv", seg.recording.segment_id);
        write_recording_csv(&seg.recording, out.join(&file))?;
        let entry = ManifestEntry {
            file,
            subject_id: seg.recording.subject_id.clone(),
            segment_id: seg.recording.segment_id.clone(),
            activity_tag: seg.activity_tag.clone(),
            labels: None,
        };
        write_labels_csv(&seg.labels, out.join(entry.labels_file()))?;
        let fused = seg.labels.fused();
        windows += fused.len();
        artifact_windows += fused.iter().filter(|l| l.is_artifact()).count();
        entries.push(entry);
    }
    write_manifest(&entries, out.join("manifest.json"))?;
    println!(
        "wrote {} recordings, {windows} windows, {:.1}% artifact, to {}",
        entries.len(),
        100.0 * artifact_windows as f64 / windows.max(1) as f64,
        out.display()
    );
    Ok(())
}

pub fn features(manifest: &Path, set: &str, out: &Path) -> Result<()> {
    let set: FeatureSet = set.parse()?;
    let windows = eval::load_windows(manifest, false)?;
    let m = assemble(&windows, set)?;
    write_feature_csv(&m, out)?;
    println!("wrote {} windows x {} features to {}", m.n_rows(), m.n_cols(), out.display());
    Ok(())
}

pub fn parse_override(s: &str) -> Result<(String, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::InvalidArgument(format!("override {s:?} is not NAME=VALUE")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("override {s:?}: {value:?} is not a number")))?;
    Ok((name.trim().to_string(), v))
}

pub fn train(
    manifest: &Path,
    algorithm: &str,
    set: &str,
    seed: u64,
    overrides: &[String],
    out: &Path,
) -> Result<()> {
    let algorithm: Algorithm = algorithm.parse()?;
    let set: FeatureSet = set.parse()?;
    let mut h = Hyperparameters::default_for(algorithm);
    for o in overrides {
        let (name, v) = parse_override(o)?;
        h.set(&name, v)?;
    }
    let data = Dataset::load(manifest)?;
    let view = data.view(set)?;
    let labels = algorithm.is_supervised().then_some(data.labels());
    let det = fit(&DetectorSpec::new(h, seed), view.values(), labels)?
        .with_feature_names(view.feature_names().to_vec());
    det.save(out)?;
    println!("trained {algorithm} on {} windows x {} features, saved {}", view.n_rows(), view.n_cols(), out.display());
    Ok(())
}

pub fn score(model: &Path, features: &Path, out: &Path) -> Result<()> {
    let det = TrainedDetector::load(model)?;
    let m = read_feature_csv(features)?;
    let m = if det.feature_names.is_empty() {
        m
    } else {
        m.select_named(&det.feature_names)?
    };
    let scores = det.score(m.values())?;
    let mut text = String::from("subject_id,segment_id,window_index,score\n");
    for (id, s) in m.row_ids().iter().zip(&scores) {
        writeln!(text, "{},{},{},{s}", id.subject_id, id.segment_id, id.window_index).unwrap();
    }
    write_text(out, &text)?;
    println!("scored {} windows with {}, wrote {}", scores.len(), det.algorithm(), out.display());
    Ok(())
}
