use super::*;
use crate::numkit::RngStream;

/// Two Gaussian blobs in 4-D; artifacts sit around +2 on every axis.
fn blobs(n_clean: usize, n_art: usize, seed: u64) -> (Matrix, Vec<WindowLabel>) {
    let mut rng = RngStream::new(seed);
    let mut data = Vec::new();
    let mut y = Vec::new();
    for i in 0..n_clean + n_art {
        let art = i >= n_clean;
        for _ in 0..4 {
            data.push(rng.normal() + if art { 2.0 } else { 0.0 });
        }
        y.push(if art { WindowLabel::Artifact } else { WindowLabel::Clean });
    }
    (Matrix::from_vec(n_clean + n_art, 4, data).unwrap(), y)
}

fn fast_spec(algorithm: Algorithm, seed: u64) -> DetectorSpec {
    let mut spec = DetectorSpec::default_for(algorithm, seed);
    match &mut spec.hyperparameters {
        Hyperparameters::RandomForest(p) => p.n_trees = 25,
        Hyperparameters::IsolationForest(p) => p.n_trees = 50,
        Hyperparameters::Mlp(p) => p.epochs = 40,
        _ => {}
    }
    spec
}

fn mean_by_class(scores: &[f64], y: &[WindowLabel]) -> (f64, f64) {
    let (mut a, mut na, mut c, mut nc) = (0.0, 0.0, 0.0, 0.0);
    for (s, l) in scores.iter().zip(y) {
        if l.is_artifact() {
            a += s;
            na += 1.0;
        } else {
            c += s;
            nc += 1.0;
        }
    }
    (c / nc, a / na)
}

#[test]
fn algorithm_names_round_trip() {
    for a in Algorithm::ALL {
        assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, format!("\"{}\"", a.name()));
    }
    assert!("svm-rbf".parse::<Algorithm>().is_err());
    assert_eq!(Algorithm::ALL.iter().filter(|a| a.is_supervised()).count(), 5);
}

#[test]
fn every_detector_scores_artifacts_higher() {
    let (x, y) = blobs(120, 40, 3);
    for a in Algorithm::ALL {
        let det = fit(&fast_spec(a, 11), &x, Some(&y)).unwrap();
        let s = det.score(&x).unwrap();
        assert_eq!(s.len(), x.n_rows());
        let (clean, art) = mean_by_class(&s, &y);
        assert!(art > clean, "{a}: artifact mean {art} <= clean mean {clean}");
    }
}

#[test]
fn unsupervised_detectors_ignore_labels() {
    let (x, y) = blobs(80, 20, 5);
    let flipped: Vec<WindowLabel> = y.iter().map(|l| WindowLabel::from_bit(1 - l.as_bit()).unwrap()).collect();
    for a in Algorithm::ALL.into_iter().filter(|a| !a.is_supervised()) {
        let spec = fast_spec(a, 2);
        let s1 = fit(&spec, &x, Some(&y)).unwrap().score(&x).unwrap();
        let s2 = fit(&spec, &x, Some(&flipped)).unwrap().score(&x).unwrap();
        let s3 = fit(&spec, &x, None).unwrap().score(&x).unwrap();
        assert_eq!(s1, s2, "{a}");
        assert_eq!(s1, s3, "{a}");
    }
}

#[test]
fn same_seed_same_scores() {
    let (x, y) = blobs(60, 20, 8);
    for a in Algorithm::ALL {
        let spec = fast_spec(a, 99);
        let s1 = fit(&spec, &x, Some(&y)).unwrap().score(&x).unwrap();
        let s2 = fit(&spec, &x, Some(&y)).unwrap().score(&x).unwrap();
        assert_eq!(s1, s2, "{a}");
    }
}

#[test]
fn knn_detectors_are_scale_invariant_per_column() {
    let (x, y) = blobs(60, 20, 13);
    let mut scaled = x.clone();
    scaled.scale_column(2, 10.0);
    let (q, _) = blobs(15, 5, 14);
    let mut q_scaled = q.clone();
    q_scaled.scale_column(2, 10.0);
    for a in [Algorithm::KnnClassifier, Algorithm::KnnDistance] {
        let spec = fast_spec(a, 0);
        let s1 = fit(&spec, &x, Some(&y)).unwrap().score(&q).unwrap();
        let s2 = fit(&spec, &scaled, Some(&y)).unwrap().score(&q_scaled).unwrap();
        for (u, v) in s1.iter().zip(&s2) {
            assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0), "{a}: {u} vs {v}");
        }
    }
}

#[test]
fn json_round_trip_preserves_scores() {
    let (x, y) = blobs(50, 20, 21);
    for a in Algorithm::ALL {
        let det = fit(&fast_spec(a, 4), &x, Some(&y)).unwrap();
        let back = TrainedDetector::from_json(&det.to_json().unwrap()).unwrap();
        assert_eq!(back, det);
        assert_eq!(back.score(&x).unwrap(), det.score(&x).unwrap(), "{a}");
    }
}

#[test]
fn rejects_bad_inputs() {
    let (x, y) = blobs(10, 5, 1);
    let all_clean = vec![WindowLabel::Clean; 15];
    for a in Algorithm::ALL.into_iter().filter(|a| a.is_supervised()) {
        assert!(matches!(
            fit(&fast_spec(a, 0), &x, Some(&all_clean)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(fit(&fast_spec(a, 0), &x, None).is_err());
    }
    let mut spec = DetectorSpec::default_for(Algorithm::KnnDistance, 0);
    spec.hyperparameters.set("k", 16.0).unwrap();
    assert!(matches!(fit(&spec, &x, None), Err(Error::InvalidArgument(_))));
    let det = fit(&fast_spec(Algorithm::KnnDistance, 0), &x, Some(&y)).unwrap();
    assert!(det.score(&Matrix::zeros(0, 4)).unwrap().is_empty());
    assert!(det.score(&Matrix::zeros(3, 5)).is_err());
}

#[test]
fn set_checks_names_and_types() {
    let mut h = Hyperparameters::default_for(Algorithm::Svm);
    h.set("c", 8.0).unwrap();
    h.set("gamma", 0.5).unwrap();
    assert_eq!(
        h,
        Hyperparameters::Svm(SvmParams {
            c: 8.0,
            gamma: 0.5,
            balanced: false
        })
    );
    assert!(h.set("k", 3.0).is_err());
    let mut k = Hyperparameters::default_for(Algorithm::KnnClassifier);
    assert!(k.set("k", 2.5).is_err());
    let mut oc = Hyperparameters::default_for(Algorithm::OneClassSvm);
    oc.set("nu", 1.5).unwrap();
    assert!(oc.validate().is_err());
}

#[test]
fn version_mismatch_is_rejected() {
    let (x, y) = blobs(20, 10, 2);
    let det = fit(&fast_spec(Algorithm::LogisticRegression, 0), &x, Some(&y)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&det.to_json().unwrap()).unwrap();
    v["format_version"] = serde_json::json!(FORMAT_VERSION + 1);
    assert!(TrainedDetector::from_json(&v.to_string()).is_err());
}
