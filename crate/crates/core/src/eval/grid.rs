use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::auc::{accuracy_at, roc_auc};
use super::folds::Fold;
use crate::detectors::{self, Algorithm, DetectorSpec, Hyperparameters};
use crate::numkit::{Matrix, RngStream};
use crate::signal_io::WindowLabel;
use crate::{Error, Result};

/// Named hyperparameter axes. Points enumerate the cartesian product with
/// axes in name order and the last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grid {
    pub axes: BTreeMap<String, Vec<f64>>,
}

fn powers_of_two(from: i32, to: i32, step: usize) -> Vec<f64> {
    (from..=to).step_by(step).map(|e| 2f64.powi(e)).collect()
}

impl Grid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, values: Vec<f64>) -> Self {
        self.axes.insert(name.to_string(), values);
        self
    }

    /// No axes: the base hyperparameters are the only point.
    pub fn single() -> Self {
        Self::default()
    }

    pub fn default_for(algorithm: Algorithm) -> Self {
        let ks: Vec<f64> = (1..=30).map(f64::from).collect();
        let trees = vec![50.0, 100.0, 200.0];
        match algorithm {
            Algorithm::LogisticRegression => Grid::new().with("l2_lambda", powers_of_two(-10, 4, 2)),
            Algorithm::Mlp => Grid::new()
                .with("hidden_layers", vec![1.0, 2.0])
                .with("hidden_width", vec![8.0, 16.0, 32.0, 64.0]),
            Algorithm::Svm => Grid::new()
                .with("c", powers_of_two(-5, 15, 2))
                .with("gamma", powers_of_two(-15, 3, 2)),
            Algorithm::KnnClassifier | Algorithm::KnnDistance => Grid::new().with("k", ks),
            Algorithm::RandomForest | Algorithm::IsolationForest => Grid::new().with("n_trees", trees),
            Algorithm::OneClassSvm => Grid::new()
                .with("nu", powers_of_two(-7, -1, 1))
                .with("gamma", powers_of_two(-15, 3, 2)),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn n_points(&self) -> usize {
        self.axes.values().map(Vec::len).product()
    }

    pub fn points(&self) -> Vec<Vec<(String, f64)>> {
        let mut out = vec![Vec::new()];
        for (name, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push((name.clone(), v));
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Rejects empty axes and names the algorithm does not have.
    pub fn check(&self, base: &Hyperparameters) -> Result<()> {
        for (name, values) in &self.axes {
            if values.is_empty() {
                return Err(Error::invalid(format!("grid axis {name:?} is empty")));
            }
            base.clone().set(name, values[0])?;
        }
        Ok(())
    }

    pub fn apply(base: &Hyperparameters, point: &[(String, f64)]) -> Result<Hyperparameters> {
        let mut h = base.clone();
        for (name, v) in point {
            h.set(name, *v)?;
        }
        h.validate()?;
        Ok(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMetric {
    /// AUC of the concatenated held-out scores.
    #[default]
    PooledAuc,
    /// 0/1 accuracy with artifact called at `score >= 0.5`.
    Accuracy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPointResult {
    pub values: BTreeMap<String, f64>,
    /// `None` when the point failed to fit or was not evaluated.
    pub metric: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: Hyperparameters,
    pub best_index: usize,
    pub table: Vec<GridPointResult>,
}

/// Which rows a fit saw, as indices into the matrix passed to the search.
pub type FitObserver<'a> = dyn FnMut(&[usize]) + 'a;

/// Scores of every fold's test rows concatenated in fold order, together
/// with the matching labels.
pub(crate) fn cross_validated_scores(
    spec: &DetectorSpec,
    folds: &[Fold],
    x: &Matrix,
    y: &[WindowLabel],
    observer: &mut FitObserver<'_>,
) -> Result<(Vec<f64>, Vec<WindowLabel>)> {
    let mut scores = Vec::with_capacity(x.n_rows());
    let mut labels = Vec::with_capacity(x.n_rows());
    for (f, fold) in folds.iter().enumerate() {
        observer(&fold.train_row_indices);
        let xtr = x.select_rows(&fold.train_row_indices);
        let ytr: Vec<WindowLabel> = fold.train_row_indices.iter().map(|&i| y[i]).collect();
        let fold_spec = DetectorSpec::new(
            spec.hyperparameters.clone(),
            RngStream::derived(spec.seed, f as u64 + 1).next_u64(),
        );
        let ytr = spec.algorithm().is_supervised().then_some(ytr.as_slice());
        let det = detectors::fit(&fold_spec, &xtr, ytr)?;
        scores.extend(det.score(&x.select_rows(&fold.test_row_indices))?);
        labels.extend(fold.test_row_indices.iter().map(|&i| y[i]));
    }
    Ok((scores, labels))
}

/// Evaluates every grid point by cross-validation over `folds` and keeps
/// the best; ties go to the earliest point. Unsupervised detectors never
/// see `y` while fitting. A one-point grid is returned without evaluation.
pub fn grid_search(
    base: &DetectorSpec,
    grid: &Grid,
    folds: &[Fold],
    x: &Matrix,
    y: &[WindowLabel],
    metric: SelectionMetric,
    observer: &mut FitObserver<'_>,
) -> Result<GridSearchResult> {
    grid.check(&base.hyperparameters)?;
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    if points.len() == 1 {
        return Ok(GridSearchResult {
            best: Grid::apply(&base.hyperparameters, &points[0])?,
            best_index: 0,
            table: vec![GridPointResult {
                values: points[0].iter().cloned().collect(),
                metric: None,
            }],
        });
    }
    let mut table = Vec::with_capacity(points.len());
    let mut best: Option<(usize, f64, Hyperparameters)> = None;
    let mut undefined = None;
    for (i, point) in points.iter().enumerate() {
        let value = Grid::apply(&base.hyperparameters, point).and_then(|h| {
            let spec = DetectorSpec::new(h.clone(), base.seed);
            let (s, l) = cross_validated_scores(&spec, folds, x, y, observer)?;
            let m = match metric {
                SelectionMetric::PooledAuc => roc_auc(&s, &l)?,
                SelectionMetric::Accuracy => accuracy_at(&s, &l, 0.5)?,
            };
            Ok((m, h))
        });
        let metric_value = match value {
            Ok((m, h)) => {
                if best.as_ref().is_none_or(|(_, b, _)| m > *b) {
                    best = Some((i, m, h));
                }
                Some(m)
            }
            Err(e @ Error::UndefinedAuc(_)) => {
                undefined.get_or_insert(e);
                None
            }
            Err(Error::InvalidArgument(_) | Error::TrainingDivergence(_)) => None,
            Err(e) => return Err(e),
        };
        table.push(GridPointResult {
            values: point.iter().cloned().collect(),
            metric: metric_value,
        });
    }
    match best {
        Some((best_index, _, best)) => Ok(GridSearchResult {
            best,
            best_index,
            table,
        }),
        None => Err(undefined.unwrap_or_else(|| Error::invalid("no grid point could be fitted"))),
    }
}
