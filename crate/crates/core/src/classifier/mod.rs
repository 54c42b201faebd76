//! Binary RBF-kernel max-margin classifier.
//!
//! Labels map to targets -1 (neutral) and +1 (distracted). The decision
//! function is `sum_i coef_i K(sv_i, x) + bias`; a decision value of exactly
//! zero predicts neutral.

mod kernel;
pub mod smo;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{standardize_per_vector, FeatureScaler, Standardization};
use crate::label::Label;

pub use kernel::{rbf_kernel, squared_distance};
pub use smo::{dual_objective, DualSolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub gamma: f64,
    pub c: f64,
}

impl KernelParams {
    pub fn new(gamma: f64, c: f64) -> Result<Self> {
        let p = Self { gamma, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// `gamma = 1 / (n_features * mean column variance)`; falls back to
    /// `1 / n_features` when the data has no variance at all.
    pub fn scale_heuristic(x: &[Vec<f64>], c: f64) -> Self {
        let d = x.first().map_or(1, Vec::len).max(1);
        let n = x.len().max(1) as f64;
        let mut total_var = 0.0;
        for j in 0..d {
            let mean = x.iter().map(|r| r[j]).sum::<f64>() / n;
            total_var += x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        }
        let mean_var = total_var / d as f64;
        let gamma = if mean_var > 0.0 {
            1.0 / (d as f64 * mean_var)
        } else {
            1.0 / d as f64
        };
        Self { gamma, c }
    }
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    /// Stop once the maximal KKT violation falls below this.
    pub tolerance: f64,
    /// Iteration cap, in multiples of the training-set size.
    pub max_passes: usize,
    /// Seeds the scan order used to break ties in working-pair selection.
    pub seed: u64,
    pub cache_mb: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_passes: 10_000,
            seed: 0,
            cache_mb: 256,
        }
    }
}

/// Kernel expansion produced by training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelParams,
}

impl SvmModel {
    pub fn n_features(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if !self.support_vectors.is_empty() && x.len() != self.n_features() {
            return Err(Error::Data(format!(
                "input has {} features, model expects {}",
                x.len(),
                self.n_features()
            )));
        }
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, coef)| coef * rbf_kernel(sv, x, self.kernel.gamma))
            .sum();
        Ok(sum + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(label_of_decision(self.decision_value(x)?))
    }
}

/// Sign rule with ties going to neutral.
pub fn label_of_decision(d: f64) -> Label {
    if d > 0.0 {
        Label::Distracted
    } else {
        Label::Neutral
    }
}

fn check_training_data(x: &[Vec<f64>], labels: &[Label]) -> Result<()> {
    if x.len() != labels.len() {
        return Err(Error::Training(format!(
            "{} feature rows but {} labels",
            x.len(),
            labels.len()
        )));
    }
    let d = x.first().map_or(0, Vec::len);
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::Training("feature rows have inconsistent lengths".into()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Training("non-finite feature value in training data".into()));
    }
    let pos = labels.iter().filter(|l| **l == Label::Distracted).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::Training(
            "training data must contain both neutral and distracted examples".into(),
        ));
    }
    Ok(())
}

/// Solves the dual and returns the raw multipliers alongside the model.
pub fn train_dual(
    x: &[Vec<f64>],
    labels: &[Label],
    kernel: &KernelParams,
    smo: &SmoParams,
) -> Result<(SvmModel, DualSolution)> {
    check_training_data(x, labels)?;
    kernel.validate()?;
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let sol = smo::solve(x, &y, kernel, smo);
    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(x[i].clone());
            dual_coefs.push(a * y[i]);
        }
    }
    let model = SvmModel {
        support_vectors,
        dual_coefs,
        bias: sol.bias,
        kernel: *kernel,
    };
    Ok((model, sol))
}

/// Trains on already standardised features.
pub fn train(x: &[Vec<f64>], labels: &[Label], kernel: &KernelParams, smo: &SmoParams) -> Result<SvmModel> {
    train_dual(x, labels, kernel, smo).map(|(m, _)| m)
}

fn default_label_map() -> BTreeMap<String, Label> {
    BTreeMap::from([("-1".to_owned(), Label::Neutral), ("1".to_owned(), Label::Distracted)])
}

/// A classifier bundled with the standardisation it was trained under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub svm: SvmModel,
    pub scaler: FeatureScaler,
    pub standardization: Standardization,
    pub label_map: BTreeMap<String, Label>,
}

impl TrainedModel {
    /// Standardises `raw` features, then trains.
    ///
    /// `kernel` of `None` picks gamma by [`KernelParams::scale_heuristic`]
    /// on the standardised data with `c`.
    pub fn fit(
        raw: &[Vec<f64>],
        labels: &[Label],
        standardization: Standardization,
        kernel: Option<KernelParams>,
        c: f64,
        smo: &SmoParams,
    ) -> Result<Self> {
        let (scaler, x) = match standardization {
            Standardization::Dataset => {
                let scaler = crate::features::fit_scaler(raw).map_err(|e| Error::Training(e.to_string()))?;
                let x = scaler.apply_all(raw)?;
                (scaler, x)
            }
            Standardization::PerHeatmap => {
                let len = raw.first().map_or(0, Vec::len);
                (FeatureScaler::identity(len), raw.iter().map(|r| standardize_per_vector(r)).collect())
            }
        };
        let kernel = kernel.unwrap_or_else(|| KernelParams::scale_heuristic(&x, c));
        let svm = train(&x, labels, &kernel, smo)?;
        Ok(Self {
            svm,
            scaler,
            standardization,
            label_map: default_label_map(),
        })
    }

    /// Applies the model's standardisation to a raw feature vector.
    pub fn standardize(&self, raw: &[f64]) -> Result<Vec<f64>> {
        match self.standardization {
            Standardization::Dataset => self.scaler.apply(raw),
            Standardization::PerHeatmap => {
                if raw.len() != self.scaler.len() {
                    return Err(Error::Data(format!(
                        "input has {} features, model expects {}",
                        raw.len(),
                        self.scaler.len()
                    )));
                }
                Ok(standardize_per_vector(raw))
            }
        }
    }

    /// Decision value for an already standardised vector.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        self.svm.decision_value(x)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        self.svm.predict(x)
    }

    /// Standardises and predicts.
    pub fn classify(&self, raw: &[f64]) -> Result<Label> {
        self.predict(&self.standardize(raw)?)
    }
}
