//! The eight detectors behind one fit/score interface.
//!
//! Every detector standardizes its training rows internally and reapplies
//! the same transform when scoring. Scores are oriented so that higher means
//! more artifact-like: probabilities for logistic regression and the MLP,
//! decision values for the SVM, vote fractions for the kNN classifier and
//! the random forest, and anomaly scores for the three unsupervised
//! detectors, which never look at labels.

pub mod forest;
pub mod iforest;
pub mod knn;
pub mod logistic;
pub mod mlp;
mod params;
pub mod smo;
pub mod svm;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use params::*;

use crate::numkit::{Matrix, Standardizer};
use crate::signal_io::WindowLabel;
use crate::{Error, Result};

/// Version tag written into serialized detectors.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    LogisticRegression,
    Mlp,
    Svm,
    KnnClassifier,
    RandomForest,
    OneClassSvm,
    KnnDistance,
    IsolationForest,
}

impl Algorithm {
    /// Supervised first, in table order.
    pub const ALL: [Algorithm; 8] = [
        Algorithm::LogisticRegression,
        Algorithm::Mlp,
        Algorithm::Svm,
        Algorithm::KnnClassifier,
        Algorithm::RandomForest,
        Algorithm::OneClassSvm,
        Algorithm::KnnDistance,
        Algorithm::IsolationForest,
    ];

    pub fn is_supervised(self) -> bool {
        !matches!(
            self,
            Algorithm::OneClassSvm | Algorithm::KnnDistance | Algorithm::IsolationForest
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LogisticRegression => "logistic-regression",
            Algorithm::Mlp => "mlp",
            Algorithm::Svm => "svm",
            Algorithm::KnnClassifier => "knn-classifier",
            Algorithm::RandomForest => "random-forest",
            Algorithm::OneClassSvm => "one-class-svm",
            Algorithm::KnnDistance => "knn-distance",
            Algorithm::IsolationForest => "isolation-forest",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::invalid(format!("unknown algorithm {s:?} (one of {})", names.join(", ")))
            })
    }
}

/// Algorithm, hyperparameters and seed: everything `fit` needs besides data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
}

impl DetectorSpec {
    pub fn new(hyperparameters: Hyperparameters, seed: u64) -> Self {
        Self {
            hyperparameters,
            seed,
        }
    }

    pub fn default_for(algorithm: Algorithm, seed: u64) -> Self {
        Self::new(Hyperparameters::default_for(algorithm), seed)
    }

    pub fn algorithm(&self) -> Algorithm {
        self.hyperparameters.algorithm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    LogisticRegression(logistic::LogisticModel),
    Mlp(mlp::MlpModel),
    Svm(svm::KernelExpansion),
    KnnClassifier { rows: Matrix, labels: Vec<bool>, k: usize },
    RandomForest { trees: Vec<forest::Tree> },
    OneClassSvm(svm::KernelExpansion),
    KnnDistance { rows: Matrix, k: usize },
    IsolationForest { trees: Vec<iforest::ITree>, subsample_size: usize },
}

/// A fitted, immutable scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedDetector {
    pub format_version: u32,
    pub spec: DetectorSpec,
    /// Names of the columns the detector was trained on, when known.
    #[serde(default)]
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    pub model: Model,
}

fn binary_labels(y: Option<&[WindowLabel]>, n: usize, algorithm: Algorithm) -> Result<Vec<bool>> {
    let y = y.ok_or_else(|| Error::invalid(format!("{algorithm} is supervised and needs labels")))?;
    if y.len() != n {
        return Err(Error::invalid(format!("{} labels for {n} rows", y.len())));
    }
    let pos = y.iter().filter(|l| l.is_artifact()).count();
    if pos == 0 || pos == n {
        return Err(Error::invalid(format!(
            "{algorithm} needs both classes in the training labels"
        )));
    }
    Ok(y.iter().map(|l| l.is_artifact()).collect())
}

fn sample_weights(y: &[bool], balanced: bool) -> Vec<f64> {
    if !balanced {
        return vec![1.0; y.len()];
    }
    let n = y.len() as f64;
    let pos = y.iter().filter(|&&v| v).count() as f64;
    let (wp, wn) = (n / (2.0 * pos), n / (2.0 * (n - pos)));
    y.iter().map(|&v| if v { wp } else { wn }).collect()
}

fn need_k(k: usize, rows: usize) -> Result<()> {
    if k == 0 || k > rows {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={rows}")));
    }
    Ok(())
}

/// Fits a detector. Labels are required by the supervised algorithms and
/// ignored by the unsupervised ones.
pub fn fit(spec: &DetectorSpec, x: &Matrix, y: Option<&[WindowLabel]>) -> Result<TrainedDetector> {
    spec.hyperparameters.validate()?;
    let n = x.n_rows();
    if n == 0 {
        return Err(Error::invalid("cannot fit a detector on zero rows"));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("training matrix contains non-finite values"));
    }
    let standardizer = Standardizer::fit(x)?;
    let z = standardizer.apply(x)?;
    let algorithm = spec.algorithm();
    let model = match &spec.hyperparameters {
        Hyperparameters::LogisticRegression(p) => {
            let yb = binary_labels(y, n, algorithm)?;
            let yf: Vec<f64> = yb.iter().map(|&v| f64::from(u8::from(v))).collect();
            let w = sample_weights(&yb, p.balanced);
            Model::LogisticRegression(logistic::fit(&z, &yf, &w, p.l2_lambda, p.max_epochs)?)
        }
        Hyperparameters::Mlp(p) => {
            let yb = binary_labels(y, n, algorithm)?;
            let yf: Vec<f64> = yb.iter().map(|&v| f64::from(u8::from(v))).collect();
            let w = sample_weights(&yb, p.balanced);
            let cfg = mlp::MlpTraining {
                hidden_layers: p.hidden_layers,
                hidden_width: p.hidden_width,
                learning_rate: p.learning_rate,
                epochs: p.epochs,
                l2_lambda: p.l2_lambda,
            };
            Model::Mlp(mlp::fit(&z, &yf, &w, &cfg, spec.seed)?)
        }
        Hyperparameters::Svm(p) => {
            let yb = binary_labels(y, n, algorithm)?;
            let ys: Vec<f64> = yb.iter().map(|&v| if v { 1.0 } else { -1.0 }).collect();
            let w = sample_weights(&yb, p.balanced);
            Model::Svm(svm::fit_csvm(&z, &ys, &w, p.c, p.gamma)?)
        }
        Hyperparameters::KnnClassifier(p) => {
            let labels = binary_labels(y, n, algorithm)?;
            need_k(p.k, n)?;
            Model::KnnClassifier { rows: z, labels, k: p.k }
        }
        Hyperparameters::RandomForest(p) => {
            let yb = binary_labels(y, n, algorithm)?;
            let params = forest::TreeParams {
                max_depth: p.max_depth.unwrap_or(usize::MAX),
                min_leaf: p.min_leaf,
                max_features: ((z.n_cols() as f64).sqrt().floor() as usize).max(1),
            };
            Model::RandomForest {
                trees: forest::grow_forest(&z, &yb, p.n_trees, &params, spec.seed),
            }
        }
        Hyperparameters::OneClassSvm(p) => Model::OneClassSvm(svm::fit_one_class(&z, p.nu, p.gamma)?),
        Hyperparameters::KnnDistance(p) => {
            need_k(p.k, n)?;
            Model::KnnDistance { rows: z, k: p.k }
        }
        Hyperparameters::IsolationForest(p) => {
            if n < 2 {
                return Err(Error::invalid("isolation forest needs at least 2 rows"));
            }
            let psi = p.subsample_size.min(n);
            Model::IsolationForest {
                trees: iforest::grow_forest(&z, p.n_trees, psi, spec.seed),
                subsample_size: psi,
            }
        }
    };
    Ok(TrainedDetector {
        format_version: FORMAT_VERSION,
        spec: spec.clone(),
        feature_names: Vec::new(),
        standardizer,
        model,
    })
}

impl TrainedDetector {
    pub fn algorithm(&self) -> Algorithm {
        self.spec.algorithm()
    }

    pub fn n_features(&self) -> usize {
        self.standardizer.n_features()
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = names;
        self
    }

    /// One score per row; higher means more artifact-like.
    pub fn score(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.n_rows() == 0 {
            return Ok(Vec::new());
        }
        let z = self.standardizer.apply(x)?;
        let mut buf = Vec::new();
        let scores: Vec<f64> = z
            .rows_iter()
            .map(|r| match &self.model {
                Model::LogisticRegression(m) => m.score(r),
                Model::Mlp(m) => m.score(r),
                Model::Svm(m) => m.decision(r),
                Model::KnnClassifier { rows, labels, k } => {
                    knn::vote_fraction(rows, labels, r, *k, &mut buf)
                }
                Model::RandomForest { trees } => forest::vote_fraction(trees, r),
                Model::OneClassSvm(m) => -m.decision(r),
                Model::KnnDistance { rows, k } => knn::kth_distance(rows, r, *k, &mut buf),
                Model::IsolationForest {
                    trees,
                    subsample_size,
                } => iforest::anomaly_score(iforest::mean_path_length(trees, r), *subsample_size),
            })
            .collect();
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::TrainingDivergence(format!(
                "{} produced a non-finite score",
                self.algorithm()
            )));
        }
        Ok(scores)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: TrainedDetector = serde_json::from_str(text)?;
        if d.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "detector format version {} is not supported (expected {FORMAT_VERSION})",
                d.format_version
            )));
        }
        Ok(d)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

#[cfg(test)]
mod tests;
