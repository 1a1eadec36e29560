use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::auc::{roc_auc, roc_curve, RocPoint};
use super::dataset::Dataset;
use super::folds::{folds_for, inner_folds, Grouping};
use super::grid::{grid_search, FitObserver, Grid, GridPointResult, SelectionMetric};
use crate::detectors::{self, Algorithm, DetectorSpec, Hyperparameters};
use crate::featurize::{feature_names, FeatureSet, RowId};
use crate::numkit::{Matrix, RngStream};
use crate::signal_io::WindowLabel;
use crate::{Error, Result};

/// Everything that defines one evaluation besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub feature_set: FeatureSet,
    pub seed: u64,
    /// Values not covered by the grid.
    pub base: Hyperparameters,
    pub grid: Grid,
    pub grouping: Grouping,
    pub selection: SelectionMetric,
}

impl EvalConfig {
    /// Default hyperparameters and grid for the algorithm, automatic
    /// grouping, pooled-AUC selection.
    pub fn new(algorithm: Algorithm, feature_set: FeatureSet, seed: u64) -> Self {
        Self {
            feature_set,
            seed,
            base: Hyperparameters::default_for(algorithm),
            grid: Grid::default_for(algorithm),
            grouping: Grouping::Auto,
            selection: SelectionMetric::PooledAuc,
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.base.algorithm()
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    InSampleCv,
    OutOfSample,
    Sweep,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::InSampleCv => "in-sample",
            Protocol::OutOfSample => "out-of-sample",
            Protocol::Sweep => "sweep",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub held_out_id: String,
    pub n_test: usize,
    pub n_artifact: usize,
    pub auc: Option<f64>,
    pub auc_defined: bool,
    pub chosen: Hyperparameters,
    pub grid: Vec<GridPointResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub train_dataset: String,
    /// Same as `train_dataset` for in-sample runs.
    pub test_dataset: String,
    pub algorithm: Algorithm,
    pub feature_set: FeatureSet,
    pub grouping: Grouping,
    pub selection: SelectionMetric,
    pub seed: u64,
    pub pooled_auc: f64,
    /// Mean over folds whose AUC is defined.
    pub mean_fold_auc: Option<f64>,
    pub folds: Vec<FoldReport>,
    pub roc: Vec<RocPoint>,
    /// Not part of the canonical file.
    #[serde(skip)]
    pub wall_clock_s: f64,
}

fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // Value stores objects in sorted maps, so keys come out ordered.
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn fmt_threshold(t: Option<f64>, first: bool) -> String {
    match t {
        Some(t) => t.to_string(),
        None if first => "inf".into(),
        None => "-inf".into(),
    }
}

impl EvalReport {
    pub fn to_canonical_json(&self) -> Result<String> {
        canonical_json(self)
    }

    pub fn roc_csv(&self) -> String {
        let mut s = String::from("threshold,fpr,tpr\n");
        for (i, p) in self.roc.iter().enumerate() {
            s.push_str(&format!(
                "{},{},{}\n",
                fmt_threshold(p.threshold, i == 0),
                p.false_positive_rate,
                p.true_positive_rate
            ));
        }
        s
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_canonical_json()?)
    }

    pub fn write_roc_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.roc_csv())
    }
}

/// The rows one detector fit saw, as indices into the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitRecord {
    /// `None` for out-of-sample runs.
    pub outer_fold: Option<usize>,
    /// True for the final fit on all training rows of the fold.
    pub refit: bool,
    pub rows: Vec<usize>,
}

fn pooled(scores: &[f64], labels: &[WindowLabel]) -> Result<(f64, Vec<RocPoint>)> {
    Ok((roc_auc(scores, labels)?, roc_curve(scores, labels)?))
}

struct Tuned {
    chosen: Hyperparameters,
    table: Vec<GridPointResult>,
    detector: detectors::TrainedDetector,
}

/// Grid search over `train` rows by inner CV, then refit on all of them.
fn tune_and_fit(
    cfg: &EvalConfig,
    x: &Matrix,
    y: &[WindowLabel],
    row_ids: &[RowId],
    train: &[usize],
    seed: u64,
    mut record: impl FnMut(Vec<usize>, bool),
) -> Result<Tuned> {
    let xtr = x.select_rows(train);
    let ytr: Vec<WindowLabel> = train.iter().map(|&i| y[i]).collect();
    let base = DetectorSpec::new(cfg.base.clone(), seed);
    let (chosen, table) = if cfg.grid.n_points() > 1 {
        let ids: Vec<RowId> = train.iter().map(|&i| row_ids[i].clone()).collect();
        let folds = inner_folds(&ids, cfg.grouping.resolve(row_ids))?;
        let mut obs = |rows: &[usize]| record(rows.iter().map(|&r| train[r]).collect(), false);
        let observer: &mut FitObserver<'_> = &mut obs;
        let r = grid_search(&base, &cfg.grid, &folds, &xtr, &ytr, cfg.selection, observer)?;
        (r.best, r.table)
    } else {
        let r = grid_search(&base, &cfg.grid, &[], &xtr, &ytr, cfg.selection, &mut |_| {})?;
        (r.best, r.table)
    };
    record(train.to_vec(), true);
    let spec = DetectorSpec::new(chosen.clone(), seed);
    let labels = cfg.algorithm().is_supervised().then_some(ytr.as_slice());
    let detector = detectors::fit(&spec, &xtr, labels)?;
    Ok(Tuned {
        chosen,
        table,
        detector,
    })
}

fn check_config(cfg: &EvalConfig) -> Result<()> {
    cfg.base.validate()?;
    cfg.grid.check(&cfg.base)
}

/// Outer cross-validation with tuning inside each training split; held-out
/// scores of all folds are pooled into one AUC.
pub fn run_in_sample(dataset: &Dataset, cfg: &EvalConfig) -> Result<EvalReport> {
    run_in_sample_traced(dataset, cfg, &mut |_| {})
}

/// As [`run_in_sample`], reporting the rows of every fit to `trace`.
pub fn run_in_sample_traced(
    dataset: &Dataset,
    cfg: &EvalConfig,
    trace: &mut dyn FnMut(FitRecord),
) -> Result<EvalReport> {
    let start = Instant::now();
    check_config(cfg)?;
    let view = dataset.view(cfg.feature_set)?;
    let row_ids = view.row_ids().to_vec();
    let x = view.into_values();
    let y = dataset.labels();
    let grouping = cfg.grouping.resolve(&row_ids);
    let outer = folds_for(&row_ids, grouping)?;
    let mut all_scores = vec![0.0; x.n_rows()];
    let mut folds = Vec::with_capacity(outer.len());
    for (f, fold) in outer.iter().enumerate() {
        let seed = RngStream::derived(cfg.seed, f as u64 + 1).next_u64();
        let tuned = tune_and_fit(cfg, &x, y, &row_ids, &fold.train_row_indices, seed, |rows, refit| {
            trace(FitRecord {
                outer_fold: Some(f),
                refit,
                rows,
            })
        })?;
        let scores = tuned.detector.score(&x.select_rows(&fold.test_row_indices))?;
        let ytest: Vec<WindowLabel> = fold.test_row_indices.iter().map(|&i| y[i]).collect();
        for (&i, &s) in fold.test_row_indices.iter().zip(&scores) {
            all_scores[i] = s;
        }
        let auc = match roc_auc(&scores, &ytest) {
            Ok(a) => Some(a),
            Err(Error::UndefinedAuc(_)) => None,
            Err(e) => return Err(e),
        };
        folds.push(FoldReport {
            held_out_id: fold.held_out_id.clone(),
            n_test: ytest.len(),
            n_artifact: ytest.iter().filter(|l| l.is_artifact()).count(),
            auc,
            auc_defined: auc.is_some(),
            chosen: tuned.chosen,
            grid: tuned.table,
        });
    }
    let (pooled_auc, roc) = pooled(&all_scores, y)?;
    let defined: Vec<f64> = folds.iter().filter_map(|f| f.auc).collect();
    Ok(EvalReport {
        protocol: Protocol::InSampleCv,
        train_dataset: dataset.id.clone(),
        test_dataset: dataset.id.clone(),
        algorithm: cfg.algorithm(),
        feature_set: cfg.feature_set,
        grouping,
        selection: cfg.selection,
        seed: cfg.seed,
        pooled_auc,
        mean_fold_auc: (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64),
        folds,
        roc,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Tune by cross-validation within `train`, refit on all of it, and score
/// every row of `test`.
pub fn run_out_of_sample(train: &Dataset, test: &Dataset, cfg: &EvalConfig) -> Result<EvalReport> {
    run_out_of_sample_traced(train, test, cfg, &mut |_| {})
}

pub fn run_out_of_sample_traced(
    train: &Dataset,
    test: &Dataset,
    cfg: &EvalConfig,
    trace: &mut dyn FnMut(FitRecord),
) -> Result<EvalReport> {
    let start = Instant::now();
    check_config(cfg)?;
    let names = feature_names(cfg.feature_set);
    let (tv, sv) = (train.view(cfg.feature_set), test.view(cfg.feature_set));
    let (tv, sv) = match (tv, sv) {
        (Ok(a), Ok(b)) if a.feature_names() == names.as_slice() && b.feature_names() == names.as_slice() => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return Err(Error::invalid(format!(
                "train and test feature registries differ: {e}"
            )))
        }
        _ => return Err(Error::invalid("train and test feature registries differ")),
    };
    let row_ids = tv.row_ids().to_vec();
    let x = tv.into_values();
    let all: Vec<usize> = (0..x.n_rows()).collect();
    let grouping = cfg.grouping.resolve(&row_ids);
    let seed = RngStream::derived(cfg.seed, 1).next_u64();
    let tuned = tune_and_fit(cfg, &x, train.labels(), &row_ids, &all, seed, |rows, refit| {
        trace(FitRecord {
            outer_fold: None,
            refit,
            rows,
        })
    })?;
    let scores = tuned.detector.score(sv.values())?;
    let (pooled_auc, roc) = pooled(&scores, test.labels())?;
    let yt = test.labels();
    Ok(EvalReport {
        protocol: Protocol::OutOfSample,
        train_dataset: train.id.clone(),
        test_dataset: test.id.clone(),
        algorithm: cfg.algorithm(),
        feature_set: cfg.feature_set,
        grouping,
        selection: cfg.selection,
        seed: cfg.seed,
        pooled_auc,
        mean_fold_auc: None,
        folds: vec![FoldReport {
            held_out_id: test.id.clone(),
            n_test: yt.len(),
            n_artifact: yt.iter().filter(|l| l.is_artifact()).count(),
            auc: Some(pooled_auc),
            auc_defined: true,
            chosen: tuned.chosen,
            grid: tuned.table,
        }],
        roc,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// In-sample on one dataset or train/test across two.
#[derive(Debug, Clone, Copy)]
pub enum SweepTarget<'a> {
    InSample(&'a Dataset),
    OutOfSample { train: &'a Dataset, test: &'a Dataset },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub protocol: Protocol,
    /// The protocol each point was evaluated with.
    pub inner_protocol: Protocol,
    pub train_dataset: String,
    pub test_dataset: String,
    pub algorithm: Algorithm,
    pub feature_set: FeatureSet,
    pub seed: u64,
    pub hyperparameter: String,
    pub fixed: Hyperparameters,
    pub points: Vec<SweepPoint>,
    /// Max minus min AUC over the points.
    pub spread: f64,
}

impl SweepReport {
    pub fn to_canonical_json(&self) -> Result<String> {
        canonical_json(self)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("value,auc\n");
        for p in &self.points {
            s.push_str(&format!("{},{}\n", p.value, p.auc));
        }
        s
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_canonical_json()?)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.csv())
    }
}

/// One evaluation per value of `name` with every other hyperparameter held
/// at `cfg.base` (no grid search) and the same seed throughout.
pub fn sensitivity_sweep(target: SweepTarget<'_>, cfg: &EvalConfig, name: &str, values: &[f64]) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    let mut points = Vec::with_capacity(values.len());
    for &v in values {
        let mut base = cfg.base.clone();
        base.set(name, v)?;
        let point_cfg = EvalConfig {
            base,
            grid: Grid::single(),
            ..cfg.clone()
        };
        let report = match target {
            SweepTarget::InSample(d) => run_in_sample(d, &point_cfg)?,
            SweepTarget::OutOfSample { train, test } => run_out_of_sample(train, test, &point_cfg)?,
        };
        points.push(SweepPoint {
            value: v,
            auc: report.pooled_auc,
        });
    }
    let max = points.iter().map(|p| p.auc).fold(f64::NEG_INFINITY, f64::max);
    let min = points.iter().map(|p| p.auc).fold(f64::INFINITY, f64::min);
    let (inner_protocol, train_id, test_id) = match target {
        SweepTarget::InSample(d) => (Protocol::InSampleCv, d.id.clone(), d.id.clone()),
        SweepTarget::OutOfSample { train, test } => (Protocol::OutOfSample, train.id.clone(), test.id.clone()),
    };
    Ok(SweepReport {
        protocol: Protocol::Sweep,
        inner_protocol,
        train_dataset: train_id,
        test_dataset: test_id,
        algorithm: cfg.algorithm(),
        feature_set: cfg.feature_set,
        seed: cfg.seed,
        hyperparameter: name.to_string(),
        fixed: cfg.base.clone(),
        points,
        spread: max - min,
    })
}
