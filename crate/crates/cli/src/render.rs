//! Jet colouring of heatmap intensities.
//!
//! Entry `i` of the 256-entry lookup holds, for `x = i / 255`,
//! `r = clamp(1.5 - |4x - 3|)`, `g = clamp(1.5 - |4x - 2|)`, `b = clamp(1.5 - |4x - 1|)`
//! scaled to 0..=255. Entry 0 is dark blue and entry 255 dark red.

use std::path::Path;

use gazewall::heatmap::Grid;
use gazewall::io::read_pgm16;
use gazewall::{Error, Result};
use image::{ImageFormat, RgbImage};

pub fn jet_lut() -> [[u8; 3]; 256] {
    let channel = |x: f64, centre: f64| {
        let v = (1.5 - (4.0 * x - centre).abs()).clamp(0.0, 1.0);
        (v * 255.0).round() as u8
    };
    std::array::from_fn(|i| {
        let x = i as f64 / 255.0;
        [channel(x, 3.0), channel(x, 2.0), channel(x, 1.0)]
    })
}

/// Lookup index of an intensity; values outside `[0, 1]` are clamped.
pub fn lut_index(v: f64) -> usize {
    (v.clamp(0.0, 1.0) * 255.0).round() as usize
}

pub fn colorize(grid: &Grid) -> RgbImage {
    let lut = jet_lut();
    RgbImage::from_fn(grid.width() as u32, grid.height() as u32, |x, y| {
        image::Rgb(lut[lut_index(grid.get(x as usize, y as usize))])
    })
}

pub fn render_file(input: &Path, out: &Path) -> Result<()> {
    let grid = read_pgm16(input)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    colorize(&grid)
        .save_with_format(out, ImageFormat::Png)
        .map_err(|e| Error::Data(format!("{}: {e}", out.display())))
}
