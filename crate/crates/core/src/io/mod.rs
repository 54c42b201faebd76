//! File formats.
//!
//! | extension | content |
//! |-----------|---------|
//! | `.gaze` | session: JSON header line, then one CSV record per sample |
//! | `.pgm` + `.json` | heatmap: 16-bit binary graymap plus metadata sidecar |
//! | `.csv` | feature matrix, one row per heatmap |
//! | `.model.json` | trained classifier |
//! | `.report.json` | evaluation report |
//!
//! Text formats write floats through [`fmt_f64`] so identical inputs give
//! identical bytes.

mod features_csv;
mod heatmap_file;
mod model_file;
mod session;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub use features_csv::{features_csv_header, write_features, FeatureRow};
pub use heatmap_file::{read_pgm16, write_heatmap, write_pgm16, HeatmapSidecar};
pub use model_file::{read_model, write_model, MODEL_SCHEMA_VERSION};
pub use session::{
    format_session, parse_session, read_session, write_session, GeneratorProvenance, SessionHeader,
    SessionRecording, SESSION_SCHEMA_VERSION,
};

/// Formats a float with 17 significant digits (`d.dddddddddddddddde±x`);
/// integral values below 1e15 are written without exponent.
pub fn fmt_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        if v == 0.0 {
            // folds -0 into 0
            "0".to_owned()
        } else {
            format!("{}", v as i64)
        }
    } else {
        format!("{v:.16e}")
    }
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, to_json_string(value)?.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

/// Writes any serialisable report (evaluation or sweep) as JSON.
pub fn write_report<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    write_json(path, report)
}
