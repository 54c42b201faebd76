use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{to_json_string, write_bytes};
use crate::error::{Error, Result};
use crate::heatmap::{Grid, Heatmap};
use crate::label::Label;

/// Metadata written next to each heatmap image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapSidecar {
    pub window_start_ms: i64,
    pub window_end_ms: i64,
    pub lac: f64,
    pub driver_id: String,
    pub ground_truth: Option<Label>,
}

impl From<&Heatmap> for HeatmapSidecar {
    fn from(h: &Heatmap) -> Self {
        Self {
            window_start_ms: h.window_start_ms,
            window_end_ms: h.window_end_ms,
            lac: h.lac,
            driver_id: h.driver_id.clone(),
            ground_truth: h.ground_truth,
        }
    }
}

/// Binary 16-bit PGM (`P5`, maxval 65535, big-endian, row 0 first).
///
/// Intensities are clamped to `[0, 1]` and rounded to the nearest level.
pub fn write_pgm16(path: &Path, grid: &Grid) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n65535\n", grid.width(), grid.height()).into_bytes();
    bytes.reserve(grid.len() * 2);
    for &v in grid.data() {
        let level = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        bytes.extend_from_slice(&level.to_be_bytes());
    }
    write_bytes(path, &bytes)
}

/// Reads a binary PGM (8- or 16-bit) into a grid scaled to `[0, 1]`.
pub fn read_pgm16(path: &Path) -> Result<Grid> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::Parse {
        line: 1,
        message: format!("{}: {m}", path.display()),
    };
    // header: magic, width, height, maxval, separated by whitespace, then one whitespace byte
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" {
        return Err(bad("not a binary PGM"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (w, h, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval == 0 || maxval > 65535 {
        return Err(bad("maxval out of range"));
    }
    let wide = maxval > 255;
    let need = w * h * if wide { 2 } else { 1 };
    let body = bytes.get(pos..pos + need).ok_or_else(|| bad("pixel data truncated"))?;
    let data = if wide {
        body.chunks_exact(2)
            .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])) / maxval as f64)
            .collect()
    } else {
        body.iter().map(|&b| f64::from(b) / maxval as f64).collect()
    };
    Ok(Grid::from_vec(w, h, data))
}

/// Writes `<stem>.pgm` and `<stem>.json` into `dir`.
pub fn write_heatmap(dir: &Path, stem: &str, hm: &Heatmap) -> Result<()> {
    write_pgm16(&dir.join(format!("{stem}.pgm")), &hm.grid)?;
    let sidecar = HeatmapSidecar::from(hm);
    write_bytes(&dir.join(format!("{stem}.json")), to_json_string(&sidecar)?.as_bytes())
}
