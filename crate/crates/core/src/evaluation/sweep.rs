use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cv::{evaluate, EvalConfig, EvalReport};
use super::dataset::build_dataset;
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::heatmap::HeatmapConfig;
use crate::io::SessionRecording;

/// Window sizes (seconds) compared in the reference study.
pub const PAPER_WINDOWS: [u32; 12] = [5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub window_s: u32,
    pub n_heatmaps: usize,
    /// Percent.
    pub accuracy: f64,
    pub f1: f64,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Spearman correlation between window size and accuracy.
    pub fn window_accuracy_spearman(&self) -> f64 {
        let w: Vec<f64> = self.rows.iter().map(|r| f64::from(r.window_s)).collect();
        let a: Vec<f64> = self.rows.iter().map(|r| r.accuracy).collect();
        spearman(&w, &a)
    }
}

/// Rebuilds the dataset for every window size and cross-validates it.
///
/// `base` supplies everything but the window length; `eval` supplies the
/// fold mode, learner and seed (its `window_s` is overwritten per row).
pub fn window_sweep(
    sessions: &[SessionRecording],
    windows: &[u32],
    base: &HeatmapConfig,
    features: &FeatureConfig,
    eval: &EvalConfig,
) -> Result<SweepTable> {
    if let Some(w) = windows.iter().find(|w| !PAPER_WINDOWS.contains(w)) {
        return Err(Error::Config(format!("window {w} s is not one of {PAPER_WINDOWS:?}")));
    }
    features.validate()?;
    let mut rows = Vec::with_capacity(windows.len());
    for &window_s in windows {
        let cfg = HeatmapConfig {
            window_s,
            ..base.clone()
        };
        cfg.validate()?;
        let dataset = build_dataset(sessions, &cfg, features);
        log::info!("window {window_s} s: {} heatmaps", dataset.len());
        let eval = EvalConfig {
            window_s,
            stride_s: cfg.stride_s,
            ..eval.clone()
        };
        let report = evaluate(&dataset, &eval)?;
        rows.push(SweepRow {
            window_s,
            n_heatmaps: dataset.len(),
            accuracy: report.accuracy,
            f1: report.f1,
            report,
        });
    }
    Ok(SweepTable { rows })
}

/// Text table with the window size, accuracy (percent) and F1 columns.
pub fn format_sweep_table(table: &SweepTable) -> String {
    let mut out = String::from("Window Size | Accuracy | F1-Score\n------------+----------+---------\n");
    for r in &table.rows {
        let _ = writeln!(out, "{:>11} | {:>8.3} | {:>8.3}", r.window_s, r.accuracy, r.f1);
    }
    out
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}
