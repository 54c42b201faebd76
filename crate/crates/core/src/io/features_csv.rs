use std::fmt::Write as _;
use std::path::Path;

use super::{fmt_f64, write_bytes};
use crate::error::{Error, Result};
use crate::features::{feature_names, FEATURE_LEN};
use crate::label::Label;

/// One exported heatmap: its features plus identifying metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub features: Vec<f64>,
    pub driver_id: String,
    pub window_start_ms: i64,
    pub ground_truth: Option<Label>,
}

/// Header: 75 feature columns, then `driver_id,window_start_ms,ground_truth`.
pub fn features_csv_header() -> String {
    let mut cols = feature_names();
    cols.extend(["driver_id", "window_start_ms", "ground_truth"].map(String::from));
    cols.join(",")
}

pub fn write_features(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let mut out = features_csv_header();
    out.push('\n');
    for r in rows {
        if r.features.len() != FEATURE_LEN {
            return Err(Error::Data(format!(
                "feature row has {} values, expected {FEATURE_LEN}",
                r.features.len()
            )));
        }
        if r.driver_id.contains([',', '\n', '"']) {
            return Err(Error::Data(format!("driver id `{}` is not CSV-safe", r.driver_id)));
        }
        for v in &r.features {
            out.push_str(&fmt_f64(*v));
            out.push(',');
        }
        let truth = r.ground_truth.map_or("", |l| l.as_str());
        let _ = writeln!(out, "{},{},{}", r.driver_id, r.window_start_ms, truth);
    }
    write_bytes(path, out.as_bytes())
}
