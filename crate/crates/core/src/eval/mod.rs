//! ROC/AUC, grouped cross-validation, grid search and the in-sample,
//! out-of-sample and sweep protocols.

mod auc;
mod dataset;
mod folds;
mod grid;
mod protocol;

pub use auc::{accuracy_at, roc_auc, roc_curve, trapezoid_area, RocPoint};
pub use dataset::{load_windows, Dataset};
pub use folds::{folds_for, inner_folds, loseg_folds, loso_folds, Fold, Grouping};
pub use grid::{grid_search, FitObserver, Grid, GridPointResult, GridSearchResult, SelectionMetric};
pub use protocol::{
    run_in_sample, run_in_sample_traced, run_out_of_sample, run_out_of_sample_traced, sensitivity_sweep,
    EvalConfig, EvalReport, FitRecord, FoldReport, Protocol, SweepPoint, SweepReport, SweepTarget,
};
