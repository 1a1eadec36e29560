use serde::{Deserialize, Serialize};

use super::Algorithm;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticParams {
    pub l2_lambda: f64,
    pub max_epochs: usize,
    /// Reweight classes to equal total weight.
    #[serde(default)]
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
    #[serde(default)]
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    #[serde(default)]
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KParams {
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until the leaf rules stop it.
    #[serde(default)]
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneClassParams {
    pub nu: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsolationParams {
    pub n_trees: usize,
    /// Clamped to the number of training rows.
    pub subsample_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case")]
pub enum Hyperparameters {
    LogisticRegression(LogisticParams),
    Mlp(MlpParams),
    Svm(SvmParams),
    KnnClassifier(KParams),
    RandomForest(ForestParams),
    OneClassSvm(OneClassParams),
    KnnDistance(KParams),
    IsolationForest(IsolationParams),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be >= 1")))
    }
}

fn as_usize(name: &str, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(Error::invalid(format!("{name} must be a non-negative integer, got {v}")))
    }
}

impl Hyperparameters {
    pub fn default_for(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::LogisticRegression => Self::LogisticRegression(LogisticParams {
                l2_lambda: 1e-2,
                max_epochs: 500,
                balanced: false,
            }),
            Algorithm::Mlp => Self::Mlp(MlpParams {
                hidden_layers: 1,
                hidden_width: 16,
                learning_rate: 0.05,
                epochs: 60,
                l2_lambda: 1e-4,
                balanced: false,
            }),
            Algorithm::Svm => Self::Svm(SvmParams {
                c: 1.0,
                gamma: 1.0 / 64.0,
                balanced: false,
            }),
            Algorithm::KnnClassifier => Self::KnnClassifier(KParams { k: 5 }),
            Algorithm::RandomForest => Self::RandomForest(ForestParams {
                n_trees: 100,
                max_depth: None,
                min_leaf: 1,
            }),
            Algorithm::OneClassSvm => Self::OneClassSvm(OneClassParams {
                nu: 0.1,
                gamma: 1.0 / 64.0,
            }),
            Algorithm::KnnDistance => Self::KnnDistance(KParams { k: 5 }),
            Algorithm::IsolationForest => Self::IsolationForest(IsolationParams {
                n_trees: 100,
                subsample_size: 256,
            }),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Self::LogisticRegression(_) => Algorithm::LogisticRegression,
            Self::Mlp(_) => Algorithm::Mlp,
            Self::Svm(_) => Algorithm::Svm,
            Self::KnnClassifier(_) => Algorithm::KnnClassifier,
            Self::RandomForest(_) => Algorithm::RandomForest,
            Self::OneClassSvm(_) => Algorithm::OneClassSvm,
            Self::KnnDistance(_) => Algorithm::KnnDistance,
            Self::IsolationForest(_) => Algorithm::IsolationForest,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::LogisticRegression(p) => {
                if !(p.l2_lambda >= 0.0) {
                    return Err(Error::invalid("l2_lambda must be >= 0"));
                }
                at_least_one("max_epochs", p.max_epochs)
            }
            Self::Mlp(p) => {
                if !(1..=2).contains(&p.hidden_layers) {
                    return Err(Error::invalid("hidden_layers must be 1 or 2"));
                }
                at_least_one("hidden_width", p.hidden_width)?;
                at_least_one("epochs", p.epochs)?;
                positive("learning_rate", p.learning_rate)?;
                if !(p.l2_lambda >= 0.0) {
                    return Err(Error::invalid("l2_lambda must be >= 0"));
                }
                Ok(())
            }
            Self::Svm(p) => {
                positive("c", p.c)?;
                positive("gamma", p.gamma)
            }
            Self::KnnClassifier(p) | Self::KnnDistance(p) => at_least_one("k", p.k),
            Self::RandomForest(p) => {
                at_least_one("n_trees", p.n_trees)?;
                at_least_one("min_leaf", p.min_leaf)
            }
            Self::OneClassSvm(p) => {
                if !(p.nu > 0.0 && p.nu <= 1.0) {
                    return Err(Error::invalid(format!("nu must lie in (0, 1], got {}", p.nu)));
                }
                positive("gamma", p.gamma)
            }
            Self::IsolationForest(p) => {
                at_least_one("n_trees", p.n_trees)?;
                if p.subsample_size < 2 {
                    return Err(Error::invalid("subsample_size must be >= 2"));
                }
                Ok(())
            }
        }
    }

    /// Overrides one named hyperparameter. Integer knobs must get integral
    /// values; boolean knobs take 0 or 1.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let flag = |v: f64| -> Result<bool> {
            match v {
                0.0 => Ok(false),
                1.0 => Ok(true),
                _ => Err(Error::invalid(format!("{name} takes 0 or 1, got {v}"))),
            }
        };
        let algorithm = self.algorithm();
        match (self, name) {
            (Self::LogisticRegression(p), "l2_lambda") => p.l2_lambda = value,
            (Self::LogisticRegression(p), "max_epochs") => p.max_epochs = as_usize(name, value)?,
            (Self::LogisticRegression(p), "balanced") => p.balanced = flag(value)?,
            (Self::Mlp(p), "hidden_layers") => p.hidden_layers = as_usize(name, value)?,
            (Self::Mlp(p), "hidden_width") => p.hidden_width = as_usize(name, value)?,
            (Self::Mlp(p), "learning_rate") => p.learning_rate = value,
            (Self::Mlp(p), "epochs") => p.epochs = as_usize(name, value)?,
            (Self::Mlp(p), "l2_lambda") => p.l2_lambda = value,
            (Self::Mlp(p), "balanced") => p.balanced = flag(value)?,
            (Self::Svm(p), "c") => p.c = value,
            (Self::Svm(p), "gamma") => p.gamma = value,
            (Self::Svm(p), "balanced") => p.balanced = flag(value)?,
            (Self::KnnClassifier(p) | Self::KnnDistance(p), "k") => p.k = as_usize(name, value)?,
            (Self::RandomForest(p), "n_trees") => p.n_trees = as_usize(name, value)?,
            (Self::RandomForest(p), "max_depth") => p.max_depth = Some(as_usize(name, value)?),
            (Self::RandomForest(p), "min_leaf") => p.min_leaf = as_usize(name, value)?,
            (Self::OneClassSvm(p), "nu") => p.nu = value,
            (Self::OneClassSvm(p), "gamma") => p.gamma = value,
            (Self::IsolationForest(p), "n_trees") => p.n_trees = as_usize(name, value)?,
            (Self::IsolationForest(p), "subsample_size") => p.subsample_size = as_usize(name, value)?,
            _ => {
                return Err(Error::invalid(format!(
                    "{algorithm} has no hyperparameter {name:?}"
                )))
            }
        }
        Ok(())
    }
}
