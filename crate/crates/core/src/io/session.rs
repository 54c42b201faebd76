use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fmt_f64, write_bytes};
use crate::error::{Error, Result};
use crate::geometry::{GazeSample, Vec3, VirtualWall};
use crate::label::Label;

pub const SESSION_SCHEMA_VERSION: u32 = 1;

/// How a synthetic session was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorProvenance {
    pub generator: String,
    pub seed: u64,
    pub duration_s: u32,
    pub profile: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHeader {
    pub schema_version: u32,
    pub driver_id: String,
    pub label: Label,
    pub wall: VirtualWall,
    pub sample_period_ms: u32,
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<GeneratorProvenance>,
}

/// A recorded (or simulated) drive: header plus time-ordered samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecording {
    pub header: SessionHeader,
    pub samples: Vec<GazeSample>,
}

impl SessionRecording {
    pub fn new(
        driver_id: impl Into<String>,
        label: Label,
        wall: VirtualWall,
        sample_period_ms: u32,
        samples: Vec<GazeSample>,
        provenance: Option<GeneratorProvenance>,
    ) -> Self {
        Self {
            header: SessionHeader {
                schema_version: SESSION_SCHEMA_VERSION,
                driver_id: driver_id.into(),
                label,
                wall,
                sample_period_ms,
                n_samples: samples.len(),
                provenance,
            },
            samples,
        }
    }

    /// Conventional file name, `<driver>_<label>.gaze`.
    pub fn file_name(&self) -> String {
        format!("{}_{}.gaze", self.header.driver_id, self.header.label)
    }
}

/// Serialises a session to the `.gaze` text format.
pub fn format_session(rec: &SessionRecording) -> Result<String> {
    let mut header = rec.header.clone();
    header.n_samples = rec.samples.len();
    let mut out = serde_json::to_string(&header).map_err(|e| Error::Data(e.to_string()))?;
    out.push('\n');
    for s in &rec.samples {
        let h = s.head_position;
        let g = s.gaze_direction;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.timestamp_ms,
            fmt_f64(h.x),
            fmt_f64(h.y),
            fmt_f64(h.z),
            fmt_f64(g.x),
            fmt_f64(g.y),
            fmt_f64(g.z),
            u8::from(s.valid)
        );
    }
    Ok(out)
}

fn parse_record(line: &str, lineno: usize) -> Result<GazeSample> {
    let err = |message: String| Error::Parse {
        line: lineno,
        message,
    };
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 8 {
        return Err(err(format!("expected 8 fields, found {}", fields.len())));
    }
    let timestamp_ms = fields[0]
        .parse::<i64>()
        .map_err(|e| err(format!("timestamp `{}`: {e}", fields[0])))?;
    let mut v = [0.0; 6];
    for (k, slot) in v.iter_mut().enumerate() {
        let f = fields[k + 1];
        *slot = f.parse::<f64>().map_err(|e| err(format!("field {} `{f}`: {e}", k + 2)))?;
        if !slot.is_finite() {
            return Err(err(format!("field {} is not finite", k + 2)));
        }
    }
    let valid = match fields[7] {
        "1" => true,
        "0" => false,
        other => return Err(err(format!("validity flag `{other}` is not 0 or 1"))),
    };
    Ok(GazeSample {
        timestamp_ms,
        head_position: Vec3::new(v[0], v[1], v[2]),
        gaze_direction: Vec3::new(v[3], v[4], v[5]),
        valid,
    })
}

/// Parses `.gaze` text. Line numbers in errors are 1-based, header included.
pub fn parse_session(text: &str) -> Result<SessionRecording> {
    let mut lines = text.lines();
    let first = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty session file".into(),
    })?;
    let raw: serde_json::Value = serde_json::from_str(first).map_err(|e| Error::Parse {
        line: 1,
        message: format!("bad header: {e}"),
    })?;
    let found = raw.get("schema_version").and_then(|v| v.as_u64()).ok_or(Error::Parse {
        line: 1,
        message: "header lacks schema_version".into(),
    })?;
    if found != u64::from(SESSION_SCHEMA_VERSION) {
        return Err(Error::VersionMismatch {
            found: found as u32,
            expected: SESSION_SCHEMA_VERSION,
        });
    }
    let header: SessionHeader = serde_json::from_value(raw).map_err(|e| Error::Parse {
        line: 1,
        message: format!("bad header: {e}"),
    })?;

    let mut samples = Vec::with_capacity(header.n_samples);
    let mut last_t = None;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let s = parse_record(line, lineno)?;
        if last_t.is_some_and(|t| s.timestamp_ms <= t) {
            return Err(Error::Parse {
                line: lineno,
                message: "timestamps must strictly increase".into(),
            });
        }
        last_t = Some(s.timestamp_ms);
        samples.push(s);
    }
    if samples.len() != header.n_samples {
        return Err(Error::Parse {
            line: samples.len() + 2,
            message: format!(
                "truncated: header announces {} records, file holds {}",
                header.n_samples,
                samples.len()
            ),
        });
    }
    Ok(SessionRecording { header, samples })
}

pub fn write_session(path: &Path, rec: &SessionRecording) -> Result<()> {
    write_bytes(path, format_session(rec)?.as_bytes())
}

pub fn read_session(path: &Path) -> Result<SessionRecording> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_session(&text)
}
