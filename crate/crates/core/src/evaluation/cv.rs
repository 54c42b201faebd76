use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::metrics::{accuracy, confusion_counts, f1_score, row_normalize, Confusion};
use super::split::{split_leave_one_driver_out, split_stratified_kfold, FoldSplit};
use crate::classifier::{KernelParams, SmoParams, SvmModel, TrainedModel};
use crate::error::{Error, Result};
use crate::features::{fit_scaler, standardize_per_vector, FeatureScaler, Standardization};
use crate::label::Label;

/// Something that can be fitted on standardised features.
pub trait Learner: Sync {
    type Model: Predictor + Send;
    fn fit(&self, x: &[Vec<f64>], y: &[Label]) -> Result<Self::Model>;
}

pub trait Predictor {
    fn predict(&self, x: &[f64]) -> Result<Label>;
}

impl Predictor for SvmModel {
    fn predict(&self, x: &[f64]) -> Result<Label> {
        SvmModel::predict(self, x)
    }
}

/// RBF-kernel SVM; `gamma = None` applies the variance-scaled heuristic per fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmLearner {
    pub gamma: Option<f64>,
    pub c: f64,
    pub smo: SmoParams,
}

impl Default for SvmLearner {
    fn default() -> Self {
        Self {
            gamma: None,
            c: 1.0,
            smo: SmoParams::default(),
        }
    }
}

impl SvmLearner {
    pub fn kernel_for(&self, x: &[Vec<f64>]) -> Result<KernelParams> {
        match self.gamma {
            Some(g) => KernelParams::new(g, self.c),
            None => {
                let k = KernelParams::scale_heuristic(x, self.c);
                k.validate()?;
                Ok(k)
            }
        }
    }
}

impl Learner for SvmLearner {
    type Model = SvmModel;

    fn fit(&self, x: &[Vec<f64>], y: &[Label]) -> Result<SvmModel> {
        let kernel = self.kernel_for(x)?;
        crate::classifier::train(x, y, &kernel, &self.smo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CvMode {
    LeaveOneDriverOut,
    StratifiedKFold { k: usize },
}

/// Everything that determines an evaluation run, echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub window_s: u32,
    pub stride_s: u32,
    pub mode: CvMode,
    pub seed: u64,
    pub standardization: Standardization,
    pub learner: SvmLearner,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            window_s: 30,
            stride_s: 1,
            mode: CvMode::LeaveOneDriverOut,
            seed: 0,
            standardization: Standardization::Dataset,
            learner: SvmLearner::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub index: usize,
    pub actual: Label,
    pub predicted: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub held_out_drivers: BTreeSet<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub purged: usize,
    /// Percent.
    pub accuracy: f64,
    pub f1: f64,
    pub confusion_counts: Confusion,
    pub predictions: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedFold {
    pub fold: usize,
    pub reason: String,
}

/// Averages over evaluated folds plus pooled counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Mean per-fold accuracy, percent.
    pub accuracy: f64,
    /// Mean per-fold F1 of the distracted class.
    pub f1: f64,
    /// Per-fold row-normalised confusion matrices, averaged; rows are actual
    /// neutral/distracted, columns predicted.
    pub confusion: [[f64; 2]; 2],
    /// Counts pooled over all folds.
    pub confusion_counts: Confusion,
    /// Accuracy of the pooled counts, percent.
    pub pooled_accuracy: f64,
    pub folds: Vec<FoldReport>,
    pub skipped_folds: Vec<SkippedFold>,
    pub config: Option<EvalConfig>,
}

fn standardize_fold(
    dataset: &Dataset,
    split: &FoldSplit,
    mode: Standardization,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let take = |idx: &[usize]| -> Vec<Vec<f64>> { idx.iter().map(|&i| dataset.rows[i].features.clone()).collect() };
    let (train, test) = (take(&split.train), take(&split.test));
    match mode {
        Standardization::Dataset => {
            let scaler: FeatureScaler = fit_scaler(&train)?;
            Ok((scaler.apply_all(&train)?, scaler.apply_all(&test)?))
        }
        Standardization::PerHeatmap => Ok((
            train.iter().map(|r| standardize_per_vector(r)).collect(),
            test.iter().map(|r| standardize_per_vector(r)).collect(),
        )),
    }
}

fn run_fold<L: Learner>(
    dataset: &Dataset,
    fold: usize,
    split: &FoldSplit,
    learner: &L,
    mode: Standardization,
) -> Result<FoldReport> {
    let (x_train, x_test) = standardize_fold(dataset, split, mode)?;
    let y_train: Vec<Label> = split.train.iter().map(|&i| dataset.rows[i].label).collect();
    let model = learner.fit(&x_train, &y_train)?;
    let predictions = split
        .test
        .iter()
        .zip(&x_test)
        .map(|(&i, x)| {
            Ok(Prediction {
                index: i,
                actual: dataset.rows[i].label,
                predicted: model.predict(x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counts = confusion_counts(predictions.iter().map(|p| (p.actual, p.predicted)));
    Ok(FoldReport {
        fold,
        held_out_drivers: split.held_out_drivers.clone(),
        n_train: split.train.len(),
        n_test: split.test.len(),
        purged: split.purged,
        accuracy: 100.0 * accuracy(&counts),
        f1: f1_score(&counts),
        confusion_counts: counts,
        predictions,
    })
}

/// Fits and scores every usable fold. Folds carrying an issue are skipped
/// and listed in the report; a training failure aborts with the fold index.
pub fn run_cv<L: Learner>(
    dataset: &Dataset,
    splits: &[FoldSplit],
    learner: &L,
    standardization: Standardization,
) -> Result<EvalReport> {
    let results: Vec<Option<Result<FoldReport>>> = splits
        .par_iter()
        .enumerate()
        .map(|(fold, split)| {
            if split.issue.is_some() || split.test.is_empty() {
                return None;
            }
            Some(run_fold(dataset, fold, split, learner, standardization).map_err(|e| Error::Fold {
                fold,
                source: Box::new(e),
            }))
        })
        .collect();

    let mut folds = Vec::new();
    let mut skipped_folds = Vec::new();
    for (fold, r) in results.into_iter().enumerate() {
        match r {
            Some(r) => folds.push(r?),
            None => {
                let reason = splits[fold].issue.clone().unwrap_or_else(|| "empty test set".into());
                log::warn!("skipping fold {fold}: {reason}");
                skipped_folds.push(SkippedFold { fold, reason });
            }
        }
    }
    aggregate(folds, skipped_folds)
}

fn aggregate(folds: Vec<FoldReport>, skipped_folds: Vec<SkippedFold>) -> Result<EvalReport> {
    if folds.is_empty() {
        return Err(Error::Data("no fold could be evaluated".into()));
    }

    let n = folds.len() as f64;
    let mut pooled = [[0u64; 2]; 2];
    let mut row_sum = [[0.0; 2]; 2];
    let mut row_n = [0usize; 2];
    for f in &folds {
        for a in 0..2 {
            for p in 0..2 {
                pooled[a][p] += f.confusion_counts[a][p];
            }
        }
        for (a, row) in row_normalize(&f.confusion_counts).iter().enumerate() {
            if let Some(r) = row {
                row_sum[a][0] += r[0];
                row_sum[a][1] += r[1];
                row_n[a] += 1;
            }
        }
    }
    let confusion = [0, 1].map(|a| {
        if row_n[a] == 0 {
            [0.0; 2]
        } else {
            [row_sum[a][0] / row_n[a] as f64, row_sum[a][1] / row_n[a] as f64]
        }
    });

    Ok(EvalReport {
        accuracy: folds.iter().map(|f| f.accuracy).sum::<f64>() / n,
        f1: folds.iter().map(|f| f.f1).sum::<f64>() / n,
        confusion,
        confusion_counts: pooled,
        pooled_accuracy: 100.0 * accuracy(&pooled),
        folds,
        skipped_folds,
        config: None,
    })
}

/// Scores an already trained model on every row, reported as a single fold.
pub fn score_model(dataset: &Dataset, model: &TrainedModel) -> Result<EvalReport> {
    let predictions = dataset
        .rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            Ok(Prediction {
                index: i,
                actual: row.label,
                predicted: model.classify(&row.features)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counts = confusion_counts(predictions.iter().map(|p| (p.actual, p.predicted)));
    let fold = FoldReport {
        fold: 0,
        held_out_drivers: dataset.drivers().into_iter().collect(),
        n_train: 0,
        n_test: dataset.len(),
        purged: 0,
        accuracy: 100.0 * accuracy(&counts),
        f1: f1_score(&counts),
        confusion_counts: counts,
        predictions,
    };
    aggregate(vec![fold], Vec::new())
}

/// Splits according to `cfg.mode`, runs the SVM and echoes the config.
pub fn evaluate(dataset: &Dataset, cfg: &EvalConfig) -> Result<EvalReport> {
    let splits = match cfg.mode {
        CvMode::LeaveOneDriverOut => split_leave_one_driver_out(dataset)?,
        CvMode::StratifiedKFold { k } => {
            let s = split_stratified_kfold(dataset, k, cfg.seed)?;
            let purged: usize = s.iter().map(|f| f.purged).sum();
            if purged > 0 {
                log::warn!("stratified folds: {purged} training windows overlapping test windows were purged");
            }
            s
        }
    };
    let learner = SvmLearner {
        smo: SmoParams {
            seed: cfg.seed,
            ..cfg.learner.smo
        },
        ..cfg.learner
    };
    let mut report = run_cv(dataset, &splits, &learner, cfg.standardization)?;
    report.config = Some(cfg.clone());
    Ok(report)
}
