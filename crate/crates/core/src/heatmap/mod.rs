//! Sliding-window gaze heatmaps.
//!
//! A window of wall hits is turned into an intensity grid in four steps:
//! each hit stamps a disc of ones onto a count grid, the counts are scaled
//! so the busiest cell is 1, a separable Gaussian blur smooths the result,
//! and the blurred grid is rescaled back to a peak of 1.

mod blur;
mod grid;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project_all, GazeSample, VirtualWall, WallHit};
use crate::label::Label;

pub use blur::{gaussian_blur, gaussian_blur_raw, gaussian_kernel};
pub use grid::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapConfig {
    pub window_s: u32,
    pub stride_s: u32,
    pub fov_radius_px: f64,
    pub blur_sigma_px: f64,
    pub blur_kernel_px: usize,
    pub sample_period_ms: u32,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        Self {
            window_s: 30,
            stride_s: 1,
            fov_radius_px: 15.0,
            blur_sigma_px: 5.0,
            blur_kernel_px: 21,
            sample_period_ms: 50,
        }
    }
}

impl HeatmapConfig {
    pub fn with_window(window_s: u32) -> Self {
        Self {
            window_s,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_s == 0 || self.stride_s == 0 {
            return Err(Error::Config("window and stride must be positive".into()));
        }
        if !(self.fov_radius_px >= 1.0) {
            return Err(Error::Config("field-of-view radius must be at least 1 px".into()));
        }
        if self.blur_kernel_px < 3 || self.blur_kernel_px % 2 == 0 {
            return Err(Error::Config("blur kernel size must be odd and at least 3".into()));
        }
        if !(self.blur_sigma_px > 0.0) {
            return Err(Error::Config("blur sigma must be positive".into()));
        }
        if self.sample_period_ms == 0 {
            return Err(Error::Config("sample period must be positive".into()));
        }
        Ok(())
    }

    pub fn window_ms(&self) -> i64 {
        i64::from(self.window_s) * 1000
    }

    pub fn stride_ms(&self) -> i64 {
        i64::from(self.stride_s) * 1000
    }

    /// Number of samples a fully tracked window contains.
    pub fn expected_samples(&self) -> usize {
        (self.window_ms() / i64::from(self.sample_period_ms)) as usize
    }
}

/// One window's normalised intensity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub grid: Grid,
    pub window_start_ms: i64,
    pub window_end_ms: i64,
    /// Looking-ahead confidence: fraction of expected samples that hit the wall.
    pub lac: f64,
    pub driver_id: String,
    pub ground_truth: Option<Label>,
}

/// Half-open time range `[start_ms, end_ms)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSpan {
    pub start_ms: i64,
    pub end_ms: i64,
}

impl TimeSpan {
    pub fn new(start_ms: i64, end_ms: i64) -> Self {
        Self { start_ms, end_ms }
    }

    /// Span covered by a sample stream: first timestamp up to one period past the last.
    pub fn of_samples(samples: &[GazeSample], sample_period_ms: u32) -> Option<Self> {
        let first = samples.first()?;
        let last = samples.last()?;
        Some(Self::new(first.timestamp_ms, last.timestamp_ms + i64::from(sample_period_ms)))
    }

    pub fn contains(&self, t: i64) -> bool {
        t >= self.start_ms && t < self.end_ms
    }

    pub fn overlaps(&self, other: &TimeSpan) -> bool {
        self.start_ms < other.end_ms && other.start_ms < self.end_ms
    }
}

/// Start/end of every window that fits inside `span`.
pub fn window_spans(span: TimeSpan, cfg: &HeatmapConfig) -> Vec<TimeSpan> {
    let (w, s) = (cfg.window_ms(), cfg.stride_ms());
    let mut out = Vec::new();
    let mut t = span.start_ms;
    while t + w <= span.end_ms {
        out.push(TimeSpan::new(t, t + w));
        t += s;
    }
    out
}

/// Slices a time-sorted hit stream into sliding windows.
pub fn window_hits<'a>(
    hits: &'a [WallHit],
    session: TimeSpan,
    cfg: &HeatmapConfig,
) -> Vec<(TimeSpan, &'a [WallHit])> {
    window_spans(session, cfg)
        .into_iter()
        .map(|span| {
            let lo = hits.partition_point(|h| h.timestamp_ms < span.start_ms);
            let hi = hits.partition_point(|h| h.timestamp_ms < span.end_ms);
            (span, &hits[lo..hi])
        })
        .collect()
}

/// Integer offsets whose distance from the origin is at most `radius`.
pub fn disc_offsets(radius: f64) -> Vec<(i64, i64)> {
    let r = radius.floor() as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if ((dx * dx + dy * dy) as f64) <= r2 {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Cell containing a continuous pixel position, clamped into the grid.
fn hit_cell(hit: &WallHit, width: usize, height: usize) -> (i64, i64) {
    let cx = (hit.px.floor() as i64).clamp(0, width as i64 - 1);
    let cy = (hit.py.floor() as i64).clamp(0, height as i64 - 1);
    (cx, cy)
}

/// Adds a disc of ones around every hit; discs are clipped at the borders.
pub fn stamp_accumulate(hits: &[WallHit], width: usize, height: usize, fov_radius_px: f64) -> Grid {
    let mut grid = Grid::zeros(width, height);
    // the disc as one horizontal run [-half, half] per row offset
    let r = fov_radius_px.floor() as i64;
    let runs: Vec<(i64, i64)> = (-r..=r)
        .map(|dy| {
            let mut half = 0;
            while ((half + 1) * (half + 1) + dy * dy) as f64 <= fov_radius_px * fov_radius_px {
                half += 1;
            }
            (dy, half)
        })
        .collect();
    let (w, h) = (width as i64, height as i64);
    for hit in hits {
        let (cx, cy) = hit_cell(hit, width, height);
        for &(dy, half) in &runs {
            let y = cy + dy;
            if y < 0 || y >= h {
                continue;
            }
            let (lo, hi) = ((cx - half).max(0), (cx + half).min(w - 1));
            let row = y as usize * width;
            for v in &mut grid.data_mut()[row + lo as usize..=row + hi as usize] {
                *v += 1.0;
            }
        }
    }
    grid
}

/// Scales the grid so its maximum is exactly 1. All-zero grids are unchanged.
pub fn normalize_opacity(mut grid: Grid) -> Grid {
    let max = grid.max();
    if max > 0.0 {
        for v in grid.data_mut() {
            *v /= max;
        }
    }
    grid
}

/// Runs stamp, normalise, blur and renormalise over hits already in a window.
pub fn heatmap_from_hits(
    hits: &[WallHit],
    span: TimeSpan,
    wall: &VirtualWall,
    cfg: &HeatmapConfig,
    driver_id: &str,
    ground_truth: Option<Label>,
) -> Heatmap {
    let raw = stamp_accumulate(hits, wall.grid_width, wall.grid_height, cfg.fov_radius_px);
    let grid = gaussian_blur(&normalize_opacity(raw), cfg.blur_sigma_px, cfg.blur_kernel_px);
    let expected = cfg.expected_samples().max(1);
    let lac = (hits.len() as f64 / expected as f64).min(1.0);
    Heatmap {
        grid,
        window_start_ms: span.start_ms,
        window_end_ms: span.end_ms,
        lac,
        driver_id: driver_id.to_owned(),
        ground_truth,
    }
}

/// Builds the heatmap for the samples of one window.
///
/// Samples outside `span` are ignored.
pub fn build_heatmap(
    samples: &[GazeSample],
    span: TimeSpan,
    wall: &VirtualWall,
    cfg: &HeatmapConfig,
    driver_id: &str,
    ground_truth: Option<Label>,
) -> Heatmap {
    let inside: Vec<GazeSample> = samples
        .iter()
        .filter(|s| span.contains(s.timestamp_ms))
        .copied()
        .collect();
    let hits = project_all(&inside, wall);
    heatmap_from_hits(&hits, span, wall, cfg, driver_id, ground_truth)
}

/// Projects a session once and maps every sliding window through `f`.
///
/// Windows are processed in parallel; the output keeps window order.
pub fn map_session_windows<T, F>(
    samples: &[GazeSample],
    wall: &VirtualWall,
    cfg: &HeatmapConfig,
    driver_id: &str,
    ground_truth: Option<Label>,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(Heatmap) -> T + Sync,
{
    let Some(span) = TimeSpan::of_samples(samples, cfg.sample_period_ms) else {
        return Vec::new();
    };
    let hits = project_all(samples, wall);
    window_hits(&hits, span, cfg)
        .into_par_iter()
        .map(|(w, in_window)| f(heatmap_from_hits(in_window, w, wall, cfg, driver_id, ground_truth)))
        .collect()
}

/// All heatmaps of a session, in window order.
pub fn session_heatmaps(
    samples: &[GazeSample],
    wall: &VirtualWall,
    cfg: &HeatmapConfig,
    driver_id: &str,
    ground_truth: Option<Label>,
) -> Vec<Heatmap> {
    map_session_windows(samples, wall, cfg, driver_id, ground_truth, |h| h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn hit(t: i64, px: f64, py: f64) -> WallHit {
        WallHit {
            timestamp_ms: t,
            px,
            py,
        }
    }

    #[test]
    fn window_count_follows_stride_formula() {
        let cfg = HeatmapConfig::default();
        assert_eq!(window_spans(TimeSpan::new(0, 60_000), &cfg).len(), 31);
        assert!(window_spans(TimeSpan::new(0, 10_000), &cfg).is_empty());
        assert!(window_hits(&[], TimeSpan::new(0, 0), &cfg).is_empty());
    }

    #[test]
    fn hits_land_in_bounded_number_of_windows() {
        let cfg = HeatmapConfig {
            window_s: 5,
            stride_s: 2,
            ..HeatmapConfig::default()
        };
        let hits: Vec<_> = (0..400).map(|i| hit(i * 50, 10.0, 10.0)).collect();
        let windows = window_hits(&hits, TimeSpan::new(0, 20_000), &cfg);
        let bound = cfg.window_s.div_ceil(cfg.stride_s) as usize;
        for h in &hits {
            let n = windows
                .iter()
                .filter(|(_, w)| w.iter().any(|x| x.timestamp_ms == h.timestamp_ms))
                .count();
            assert!(n <= bound);
        }
        for (span, w) in &windows {
            assert!(w.iter().all(|h| span.contains(h.timestamp_ms)));
        }
    }

    #[test]
    fn single_center_stamp_covers_709_cells() {
        let g = stamp_accumulate(&[hit(0, 320.0, 200.0)], 640, 400, 15.0);
        assert_eq!(g.data().iter().filter(|v| **v > 0.0).count(), 709);
        assert_eq!(g.max(), 1.0);
    }

    #[test]
    fn stamps_clip_at_corner_and_add_up() {
        let g = stamp_accumulate(&[hit(0, 0.2, 0.7)], 640, 400, 15.0);
        // quarter disc: (709 - 1 - 4 * 15) / 4 + 2 * 15 + 1 lattice points with x, y >= 0
        assert_eq!(g.data().iter().filter(|v| **v > 0.0).count(), (709 - 61) / 4 + 31);

        let one = stamp_accumulate(&[hit(0, 100.0, 50.0)], 640, 400, 15.0);
        let two = stamp_accumulate(&[hit(0, 100.0, 50.0), hit(50, 100.4, 50.9)], 640, 400, 15.0);
        for (a, b) in one.data().iter().zip(two.data()) {
            assert_eq!(*b, 2.0 * a);
        }
        assert_eq!(stamp_accumulate(&[], 640, 400, 15.0).max(), 0.0);
    }

    #[test]
    fn normalisation_scales_to_unit_peak() {
        let mut g = Grid::zeros(4, 3);
        *g.get_mut(1, 1) = 17.0;
        *g.get_mut(2, 1) = 8.5;
        let n = normalize_opacity(g);
        assert_eq!(n.get(1, 1), 1.0);
        assert_eq!(n.get(2, 1), 0.5);
        assert_eq!(normalize_opacity(Grid::zeros(4, 3)), Grid::zeros(4, 3));
    }

    #[test]
    fn lac_is_projected_over_expected() {
        let wall = VirtualWall::default();
        let cfg = HeatmapConfig::default();
        let ahead = Vec3::new(0.0, 0.0, 1.0);
        let samples: Vec<GazeSample> = (0..600)
            .map(|i| {
                let t = i * 50;
                if i % 2 == 0 {
                    GazeSample {
                        timestamp_ms: t,
                        head_position: Vec3::ZERO,
                        gaze_direction: ahead,
                        valid: true,
                    }
                } else {
                    GazeSample::invalid(t, Vec3::ZERO)
                }
            })
            .collect();
        let hm = build_heatmap(&samples, TimeSpan::new(0, 30_000), &wall, &cfg, "d", None);
        assert_eq!(hm.lac, 0.5);
        assert_eq!(hm.grid.max(), 1.0);

        let all: Vec<GazeSample> = samples
            .iter()
            .map(|s| GazeSample {
                valid: true,
                gaze_direction: ahead,
                ..*s
            })
            .collect();
        let hm = build_heatmap(&all, TimeSpan::new(0, 30_000), &wall, &cfg, "d", None);
        assert_eq!(hm.lac, 1.0);
    }

    #[test]
    fn empty_window_is_all_zero_with_zero_lac() {
        let wall = VirtualWall::default();
        let cfg = HeatmapConfig::default();
        let hm = heatmap_from_hits(&[], TimeSpan::new(0, 30_000), &wall, &cfg, "d", None);
        assert_eq!(hm.lac, 0.0);
        assert_eq!(hm.grid.max(), 0.0);
        assert!(hm.grid.data().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn config_validation() {
        assert!(HeatmapConfig::default().validate().is_ok());
        let even = HeatmapConfig {
            blur_kernel_px: 20,
            ..HeatmapConfig::default()
        };
        assert!(even.validate().is_err());
        let zero = HeatmapConfig {
            window_s: 0,
            ..HeatmapConfig::default()
        };
        assert!(zero.validate().is_err());
    }
}
