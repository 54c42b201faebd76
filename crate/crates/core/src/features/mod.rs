//! Fixed-length descriptors of a heatmap.
//!
//! Layout of the 75 values, in order:
//!
//! | index | content |
//! |-------|---------|
//! | 0..6  | intensity histogram, six equal bins over `[0, 1]` |
//! | 6..23 | zone 1 statistics (cells with intensity >= 0.2) |
//! | 23..40 | zone 2 statistics (>= 0.4) |
//! | 40..57 | zone 3 statistics (>= 0.6) |
//! | 57..74 | zone 4 statistics (>= 0.8) |
//! | 74    | looking-ahead confidence |
//!
//! Each zone block follows [`ZONE_FIELDS`].

mod scaler;
mod zones;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heatmap::{Grid, Heatmap};

pub use scaler::{fit_scaler, standardize_per_vector, FeatureScaler, Standardization};
pub use zones::{threshold_zones, threshold_zones_at, zone_stats, Mask, ZoneStats, ZONE_FIELDS, ZONE_THRESHOLDS};

pub const HIST_BINS: usize = 6;
pub const ZONE_COUNT: usize = 4;
pub const ZONE_LEN: usize = ZONE_FIELDS.len();
pub const FEATURE_LEN: usize = HIST_BINS + ZONE_COUNT * ZONE_LEN + 1;

/// Column names in vector order.
pub fn feature_names() -> Vec<String> {
    let mut names: Vec<String> = (0..HIST_BINS).map(|k| format!("hist_{k}")).collect();
    for z in 1..=ZONE_COUNT {
        names.extend(ZONE_FIELDS.iter().map(|f| format!("zone{z}_{f}")));
    }
    names.push("lac".to_owned());
    names
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub zone_thresholds: [f64; ZONE_COUNT],
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            zone_thresholds: ZONE_THRESHOLDS,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.zone_thresholds;
        let in_range = t.iter().all(|&v| v > 0.0 && v <= 1.0);
        if !in_range || t.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Config(format!(
                "zone thresholds must increase strictly within (0, 1], got {t:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub hist: [u64; HIST_BINS],
    pub zones: [ZoneStats; ZONE_COUNT],
    pub lac: f64,
}

impl FeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(FEATURE_LEN);
        out.extend(self.hist.iter().map(|&c| c as f64));
        for z in &self.zones {
            out.extend_from_slice(&z.to_array());
        }
        out.push(self.lac);
        out
    }
}

/// Histogram bin of an intensity: the largest `k` with `v >= k / 6`, capped at 5.
pub fn intensity_bin(v: f64) -> usize {
    if v <= 0.0 {
        return 0;
    }
    let edge = |k: usize| k as f64 / HIST_BINS as f64;
    let mut k = ((v * HIST_BINS as f64).floor().max(0.0) as usize).min(HIST_BINS - 1);
    if k + 1 < HIST_BINS && v >= edge(k + 1) {
        k += 1;
    } else if k > 0 && v < edge(k) {
        k -= 1;
    }
    k
}

pub fn intensity_histogram(grid: &Grid) -> [u64; HIST_BINS] {
    let mut hist = [0u64; HIST_BINS];
    for &v in grid.data() {
        hist[intensity_bin(v)] += 1;
    }
    hist
}

pub fn extract_features(hm: &Heatmap) -> FeatureVector {
    extract_features_with(hm, &FeatureConfig::default())
}

pub fn extract_features_with(hm: &Heatmap, cfg: &FeatureConfig) -> FeatureVector {
    let masks = threshold_zones_at(&hm.grid, &cfg.zone_thresholds);
    FeatureVector {
        hist: intensity_histogram(&hm.grid),
        zones: masks.each_ref().map(zone_stats),
        lac: hm.lac,
    }
}
