//! Cross-validation, window sweeps and the dual-window alert combiner.

mod cv;
mod dataset;
mod dual;
mod metrics;
mod split;
mod sweep;

pub use cv::{
    evaluate, run_cv, score_model, CvMode, EvalConfig, EvalReport, FoldReport, Learner, Prediction, Predictor,
    SkippedFold, SvmLearner,
};
pub use dataset::{build_dataset, Dataset, LabeledRow};
pub use dual::{dual_window_combine, session_verdicts, Alert, AlertKind, Verdict};
pub use metrics::{confusion_counts, f1_score, format_confusion, row_normalize, Confusion};
pub use split::{split_leave_one_driver_out, split_stratified_kfold, FoldSplit};
pub use sweep::{format_sweep_table, spearman, window_sweep, SweepRow, SweepTable, PAPER_WINDOWS};
