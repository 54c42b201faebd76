use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How feature vectors are standardised before classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Standardization {
    /// Column-wise mean/std fitted on the training set.
    #[default]
    Dataset,
    /// Each vector centred and scaled by its own mean/std across components.
    PerHeatmap,
}

/// Column-wise standardiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    /// Scaler that leaves vectors unchanged.
    pub fn identity(len: usize) -> Self {
        Self {
            mean: vec![0.0; len],
            std: vec![1.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.len() {
            return Err(Error::Data(format!(
                "feature length {} does not match scaler length {}",
                v.len(),
                self.len()
            )));
        }
        Ok(v.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| (x - m) / s)
            .collect())
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

/// Fits population mean and standard deviation per column.
///
/// Constant columns get their value as mean and a unit std so they map to 0.
pub fn fit_scaler(rows: &[Vec<f64>]) -> Result<FeatureScaler> {
    if rows.len() < 2 {
        return Err(Error::Data(format!(
            "cannot fit a scaler on {} feature vectors (need at least 2)",
            rows.len()
        )));
    }
    let len = rows[0].len();
    if rows.iter().any(|r| r.len() != len) {
        return Err(Error::Data("feature vectors have inconsistent lengths".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite feature value".into()));
    }
    let n = rows.len() as f64;
    let mut mean = vec![0.0; len];
    let mut std = vec![0.0; len];
    for j in 0..len {
        let first = rows[0][j];
        if rows.iter().all(|r| r[j] == first) {
            mean[j] = first;
            std[j] = 1.0;
            continue;
        }
        let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n;
        let s = var.sqrt();
        mean[j] = m;
        std[j] = if s > 1e-12 * m.abs().max(1.0) { s } else { 1.0 };
    }
    Ok(FeatureScaler { mean, std })
}

/// Centres a single vector on its own mean and scales it to unit variance.
pub fn standardize_per_vector(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
    let s = if s > 0.0 { s } else { 1.0 };
    v.iter().map(|x| (x - m) / s).collect()
}
