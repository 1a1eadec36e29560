use std::path::Path;

use eda_artifacts::detectors::{fit, Algorithm, DetectorSpec, TrainedDetector};
use eda_artifacts::eval::{run_in_sample, run_out_of_sample, Dataset, EvalConfig, Grid};
use eda_artifacts::featurize::FeatureSet;
use eda_artifacts::signal_io::{
    generate_synthetic_dataset, write_labels_csv, write_manifest, write_recording_csv, ManifestEntry, SynthConfig,
    SynthDatasetConfig, SyntheticSegment,
};

fn segments(seed: u64) -> Vec<SyntheticSegment> {
    generate_synthetic_dataset(&SynthDatasetConfig {
        name: "pipe".into(),
        subjects: 2,
        segments_per_subject: 2,
        recording: SynthConfig {
            duration_s: 180.0,
            ma_rate_per_min: 2.0,
            ..SynthConfig::default()
        },
        seed,
        ..SynthDatasetConfig::default()
    })
    .unwrap()
}

fn write_to(dir: &Path, segs: &[SyntheticSegment]) -> std::path::PathBuf {
    let entries: Vec<ManifestEntry> = segs
        .iter()
        .map(|s| {
            let e = ManifestEntry {
                file: format!("{}.csv", s.recording.segment_id),
                subject_id: s.recording.subject_id.clone(),
                segment_id: s.recording.segment_id.clone(),
                activity_tag: s.activity_tag.clone(),
                labels: None,
            };
            write_recording_csv(&s.recording, dir.join(&e.file)).unwrap();
            write_labels_csv(&s.labels, dir.join(e.labels_file())).unwrap();
            e
        })
        .collect();
    let m = dir.join("pipe.json");
    write_manifest(&entries, &m).unwrap();
    m
}

#[test]
fn files_load_back_to_the_same_dataset() {
    let segs = segments(11);
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_to(dir.path(), &segs);
    let loaded = Dataset::load(&manifest).unwrap();
    let memory = Dataset::from_synthetic("pipe", &segs).unwrap();
    assert_eq!(loaded.id, "pipe");
    assert_eq!(loaded.labels(), memory.labels());
    assert_eq!(loaded.features(), memory.features());

    let cfg = EvalConfig::new(Algorithm::IsolationForest, FeatureSet::EdaOnly, 3).with_grid(Grid::single());
    let a = run_in_sample(&loaded, &cfg).unwrap();
    let b = run_in_sample(&memory, &cfg).unwrap();
    assert_eq!(a.to_canonical_json().unwrap(), b.to_canonical_json().unwrap());
}

#[test]
fn saved_detector_scores_another_dataset_identically() {
    let train = Dataset::from_synthetic("a", &segments(1)).unwrap();
    let test = Dataset::from_synthetic("b", &segments(2)).unwrap();
    let x = train.view(FeatureSet::EdaOnly).unwrap();
    let spec = DetectorSpec::default_for(Algorithm::KnnDistance, 0);
    let det = fit(&spec, x.values(), None)
        .unwrap()
        .with_feature_names(x.feature_names().to_vec());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("det.json");
    det.save(&path).unwrap();
    let back = TrainedDetector::load(&path).unwrap();
    let xt = test.view(FeatureSet::EdaOnly).unwrap();
    assert_eq!(det.score(xt.values()).unwrap(), back.score(xt.values()).unwrap());
    assert_eq!(back.feature_names, x.feature_names());
}

#[test]
fn out_of_sample_folds_are_the_test_segments() {
    let train = Dataset::from_synthetic("a", &segments(5)).unwrap();
    let test = Dataset::from_synthetic("b", &segments(6)).unwrap();
    let cfg = EvalConfig::new(Algorithm::LogisticRegression, FeatureSet::EdaOnly, 9)
        .with_grid(Grid::single());
    let r = run_out_of_sample(&train, &test, &cfg).unwrap();
    let n: usize = r.folds.iter().map(|f| f.n_test).sum();
    assert_eq!(n, test.n_rows());
    assert!(r.pooled_auc > 0.8, "{}", r.pooled_auc);
}
