use serde::{Deserialize, Serialize};

use crate::heatmap::Grid;

/// Lower intensity bound of zones 1 to 4.
pub const ZONE_THRESHOLDS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

/// Field order of a zone block inside the feature vector.
pub const ZONE_FIELDS: [&str; 17] = [
    "std_x",
    "std_y",
    "centroid_x",
    "centroid_y",
    "min_x",
    "max_x",
    "min_y",
    "max_y",
    "q1_x",
    "med_x",
    "q3_x",
    "q1_y",
    "med_y",
    "q3_y",
    "area",
    "perimeter",
    "present",
];

/// Binary raster, row-major like [`Grid`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// True when every set cell of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }
}

/// Geometry of the cells above one threshold. All zeros when the zone is empty.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ZoneStats {
    pub std_x: f64,
    pub std_y: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
    pub q1_x: f64,
    pub med_x: f64,
    pub q3_x: f64,
    pub q1_y: f64,
    pub med_y: f64,
    pub q3_y: f64,
    pub area: f64,
    pub perimeter: f64,
    pub present: f64,
}

impl ZoneStats {
    pub fn to_array(&self) -> [f64; 17] {
        [
            self.std_x,
            self.std_y,
            self.centroid_x,
            self.centroid_y,
            self.min_x,
            self.max_x,
            self.min_y,
            self.max_y,
            self.q1_x,
            self.med_x,
            self.q3_x,
            self.q1_y,
            self.med_y,
            self.q3_y,
            self.area,
            self.perimeter,
            self.present,
        ]
    }
}

/// Nested masks `intensity >= threshold` for each zone, at the default thresholds.
pub fn threshold_zones(grid: &Grid) -> [Mask; 4] {
    threshold_zones_at(grid, &ZONE_THRESHOLDS)
}

/// Masks at caller-chosen thresholds; nesting needs them in increasing order.
pub fn threshold_zones_at(grid: &Grid, thresholds: &[f64; 4]) -> [Mask; 4] {
    thresholds.map(|t| Mask {
        width: grid.width(),
        height: grid.height(),
        bits: grid.data().iter().map(|&v| v >= t).collect(),
    })
}

/// Per-axis moments and order statistics from a coordinate histogram.
struct AxisStats {
    std: f64,
    mean: f64,
    min: usize,
    max: usize,
    q1: usize,
    med: usize,
    q3: usize,
}

fn axis_stats(counts: &[u64], n: u64) -> AxisStats {
    let (mut s1, mut s2) = (0u128, 0u128);
    for (c, &k) in counts.iter().enumerate() {
        s1 += c as u128 * k as u128;
        s2 += (c * c) as u128 * k as u128;
    }
    let n128 = n as u128;
    // n * sum(x^2) - (sum x)^2 is exact in integers, so no cancellation.
    let spread = n128 * s2 - s1 * s1;
    let nf = n as f64;

    // nearest rank: the value at 1-based position ceil(p * n)
    let rank = |num: u64, den: u64| (num * n).div_ceil(den).max(1);
    let at_rank = |r: u64| {
        let mut seen = 0u64;
        for (c, &k) in counts.iter().enumerate() {
            seen += k;
            if seen >= r {
                return c;
            }
        }
        counts.len() - 1
    };

    AxisStats {
        std: (spread as f64).sqrt() / nf,
        mean: s1 as f64 / nf,
        min: counts.iter().position(|&k| k > 0).unwrap_or(0),
        max: counts.iter().rposition(|&k| k > 0).unwrap_or(0),
        q1: at_rank(rank(1, 4)),
        med: at_rank(rank(1, 2)),
        q3: at_rank(rank(3, 4)),
    }
}

/// Statistics over the `(x, y)` coordinates of the set cells.
///
/// Standard deviations are population values. Quartiles use the nearest-rank
/// rule. The perimeter counts set cells with at least one 4-neighbour outside
/// the mask, the grid edge counting as outside.
pub fn zone_stats(mask: &Mask) -> ZoneStats {
    let (w, h) = (mask.width(), mask.height());
    let mut col = vec![0u64; w];
    let mut row = vec![0u64; h];
    let mut perimeter = 0u64;
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            col[x] += 1;
            row[y] += 1;
            let interior = x > 0
                && y > 0
                && x + 1 < w
                && y + 1 < h
                && mask.get(x - 1, y)
                && mask.get(x + 1, y)
                && mask.get(x, y - 1)
                && mask.get(x, y + 1);
            if !interior {
                perimeter += 1;
            }
        }
    }
    let n: u64 = col.iter().sum();
    if n == 0 {
        return ZoneStats::default();
    }
    let ax = axis_stats(&col, n);
    let ay = axis_stats(&row, n);
    ZoneStats {
        std_x: ax.std,
        std_y: ay.std,
        centroid_x: ax.mean,
        centroid_y: ay.mean,
        min_x: ax.min as f64,
        max_x: ax.max as f64,
        min_y: ay.min as f64,
        max_y: ay.max as f64,
        q1_x: ax.q1 as f64,
        med_x: ax.med as f64,
        q3_x: ax.q3 as f64,
        q1_y: ay.q1 as f64,
        med_y: ay.med as f64,
        q3_y: ay.q3 as f64,
        area: n as f64,
        perimeter: perimeter as f64,
        present: 1.0,
    }
}
