//! Independent reference implementations used as test oracles.
//!
//! Everything here is written from the definitions, deliberately avoiding
//! the library's own code paths (no separable passes, no count histograms,
//! no SMO).

#![allow(dead_code)]

use gazewall::heatmap::Grid;
use gazewall::{Vec3, VirtualWall, WallHit};
use rand::Rng;

/// Solves `head + t*dir = center + u*right + v*up` for `(t, u, v)` by Cramer's rule.
pub fn ray_wall_cramer(head: Vec3, dir: Vec3, wall: &VirtualWall) -> Option<(f64, f64, f64)> {
    let (right, up) = wall.axes();
    // columns: dir, -right, -up ; rhs: center - head
    let a = [[dir.x, -right.x, -up.x], [dir.y, -right.y, -up.y], [dir.z, -right.z, -up.z]];
    let b = [wall.center.x - head.x, wall.center.y - head.y, wall.center.z - head.z];
    let det = det3(&a);
    if det.abs() < 1e-12 {
        return None;
    }
    let col = |k: usize| {
        let mut m = a;
        for r in 0..3 {
            m[r][k] = b[r];
        }
        det3(&m) / det
    };
    Some((col(0), col(1), col(2)))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Pixel of wall-local `(u, v)` with row 0 at the top edge.
pub fn pixel_of_local(u: f64, v: f64, wall: &VirtualWall) -> (f64, f64) {
    let fx = (u + wall.physical_width / 2.0) / wall.physical_width;
    let fy = (wall.physical_height / 2.0 - v) / wall.physical_height;
    (fx * wall.grid_width as f64, fy * wall.grid_height as f64)
}

/// Lattice points `(i, j)` with `i^2 + j^2 <= r^2`, counted by scanning a square.
pub fn lattice_disc_count(r: f64) -> usize {
    let span = r.ceil() as i64 + 1;
    let mut n = 0;
    for i in -span..=span {
        for j in -span..=span {
            if (i * i + j * j) as f64 <= r * r {
                n += 1;
            }
        }
    }
    n
}

/// Per-cell stamp: counts hits whose cell center lies within `r` of the cell's center.
pub fn naive_stamp(hits: &[WallHit], w: usize, h: usize, r: f64) -> Grid {
    let mut g = Grid::zeros(w, h);
    for hit in hits {
        let hx = (hit.px.floor() as i64).clamp(0, w as i64 - 1) as f64 + 0.5;
        let hy = (hit.py.floor() as i64).clamp(0, h as i64 - 1) as f64 + 0.5;
        let (x0, x1) = (((hx - r - 1.0).max(0.0)) as usize, ((hx + r + 1.0) as usize).min(w - 1));
        let (y0, y1) = (((hy - r - 1.0).max(0.0)) as usize, ((hy + r + 1.0) as usize).min(h - 1));
        for y in y0..=y1 {
            for x in x0..=x1 {
                let (dx, dy) = (x as f64 + 0.5 - hx, y as f64 + 0.5 - hy);
                if dx * dx + dy * dy <= r * r {
                    *g.get_mut(x, y) += 1.0;
                }
            }
        }
    }
    g
}

/// Histogram by testing every edge `k/6` against every cell.
pub fn naive_histogram(g: &Grid) -> [u64; 6] {
    let mut out = [0u64; 6];
    for &v in g.data() {
        let mut bin = 0;
        for k in 1..6 {
            if v >= k as f64 / 6.0 {
                bin = k;
            }
        }
        out[bin] += 1;
    }
    out
}

fn nearest_rank(sorted: &[usize], p: f64) -> f64 {
    let n = sorted.len();
    let r = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[r - 1] as f64
}

fn two_pass_std(v: &[usize]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().map(|&a| a as f64).sum::<f64>() / n;
    let var = v.iter().map(|&a| (a as f64 - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Zone statistics from explicit coordinate lists, in feature order.
pub fn naive_zone(g: &Grid, threshold: f64) -> [f64; 17] {
    let (w, h) = (g.width(), g.height());
    let inside = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && g.get(x as usize, y as usize) >= threshold
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut perimeter = 0;
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if !inside(x, y) {
                continue;
            }
            xs.push(x as usize);
            ys.push(y as usize);
            if [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(dx, dy)| !inside(x + dx, y + dy)) {
                perimeter += 1;
            }
        }
    }
    if xs.is_empty() {
        return [0.0; 17];
    }
    let (mx, sx) = two_pass_std(&xs);
    let (my, sy) = two_pass_std(&ys);
    xs.sort_unstable();
    ys.sort_unstable();
    [
        sx,
        sy,
        mx,
        my,
        xs[0] as f64,
        *xs.last().unwrap() as f64,
        ys[0] as f64,
        *ys.last().unwrap() as f64,
        nearest_rank(&xs, 0.25),
        nearest_rank(&xs, 0.5),
        nearest_rank(&xs, 0.75),
        nearest_rank(&ys, 0.25),
        nearest_rank(&ys, 0.5),
        nearest_rank(&ys, 0.75),
        xs.len() as f64,
        perimeter as f64,
        1.0,
    ]
}

/// Direct 2-D convolution with the outer-product kernel and edge replication.
pub fn naive_blur(g: &Grid, sigma: f64, size: usize) -> Grid {
    let r = (size / 2) as i64;
    let raw: Vec<f64> = (-r..=r).map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = raw.iter().sum();
    let k: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let (w, h) = (g.width() as i64, g.height() as i64);
    let mut out = Grid::zeros(g.width(), g.height());
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for j in -r..=r {
                for i in -r..=r {
                    let sx = (x + i).clamp(0, w - 1) as usize;
                    let sy = (y + j).clamp(0, h - 1) as usize;
                    acc += k[(i + r) as usize] * k[(j + r) as usize] * g.get(sx, sy);
                }
            }
            *out.get_mut(x as usize, y as usize) = acc;
        }
    }
    out
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let mut d2 = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        d2 += d * d;
    }
    (-gamma * d2).exp()
}

/// Dual objective `sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij`.
pub fn dual_value(k: &[Vec<f64>], y: &[f64], a: &[f64]) -> f64 {
    let n = a.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += a[i] * a[j] * y[i] * y[j] * k[i][j];
        }
    }
    a.iter().sum::<f64>() - 0.5 * quad
}

/// Euclidean projection onto `{0 <= a <= c, sum a_i y_i = 0}` by bisection on the multiplier.
fn project(z: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lam: f64| -> Vec<f64> { z.iter().zip(y).map(|(zi, yi)| (zi - lam * yi).clamp(0.0, c)).collect() };
    let g = |lam: f64| at(lam).iter().zip(y).map(|(a, yi)| a * yi).sum::<f64>();
    // g is non-increasing in lam
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) < 0.0 {
        lo *= 2.0;
    }
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Projected gradient ascent on the SVM dual, run until the iterate stops moving.
pub fn projected_gradient_dual(k: &[Vec<f64>], y: &[f64], c: f64) -> Vec<f64> {
    let n = y.len();
    // step below 1 / lambda_max(Q); the Gershgorin bound suffices
    let bound = (0..n).map(|i| k[i].iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / bound;
    let mut a = vec![0.0; n];
    for _ in 0..200_000 {
        let grad: Vec<f64> = (0..n)
            .map(|i| 1.0 - y[i] * (0..n).map(|j| a[j] * y[j] * k[i][j]).sum::<f64>())
            .collect();
        let z: Vec<f64> = (0..n).map(|i| a[i] + step * grad[i]).collect();
        let next = project(&z, y, c);
        let moved = next.iter().zip(&a).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        a = next;
        if moved < 1e-13 {
            break;
        }
    }
    a
}

/// Column means and population standard deviations by two passes.
pub fn two_pass_columns(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let std: Vec<f64> = (0..d)
        .map(|j| (rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    (mean, std)
}

/// A blob-shaped intensity grid with a few Gaussian bumps, normalised to peak 1,
/// and a sprinkling of cells set exactly on zone and histogram boundaries.
pub fn random_blob_grid(rng: &mut impl Rng, w: usize, h: usize) -> Grid {
    let n = rng.random_range(0..5);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.random_range(0.0..w as f64),
                rng.random_range(0.0..h as f64),
                rng.random_range(1.0..(w as f64 / 4.0).max(2.0)),
                rng.random_range(0.2..1.0),
            )
        })
        .collect();
    let mut g = Grid::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let v: f64 = bumps
                .iter()
                .map(|&(cx, cy, s, a)| a * (-((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)) / (2.0 * s * s)).exp())
                .sum();
            *g.get_mut(x, y) = v;
        }
    }
    let max = g.max();
    if max > 0.0 {
        for v in g.data_mut() {
            *v /= max;
        }
    }
    let edges = [0.2, 0.4, 0.6, 0.8, 1.0 / 6.0, 2.0 / 6.0, 0.5, 4.0 / 6.0, 5.0 / 6.0, 1.0];
    for _ in 0..rng.random_range(0..20) {
        let (x, y) = (rng.random_range(0..w), rng.random_range(0..h));
        *g.get_mut(x, y) = edges[rng.random_range(0..edges.len())];
    }
    g
}

/// Random hits scattered around a few centres, sorted by time.
pub fn random_hits(rng: &mut impl Rng, wall: &VirtualWall, n: usize) -> Vec<WallHit> {
    let (w, h) = (wall.grid_width as f64, wall.grid_height as f64);
    let centres: Vec<(f64, f64, f64)> = (0..rng.random_range(1..4))
        .map(|_| (rng.random_range(0.0..w), rng.random_range(0.0..h), rng.random_range(1.0..80.0)))
        .collect();
    (0..n)
        .map(|i| {
            let (cx, cy, s) = centres[rng.random_range(0..centres.len())];
            WallHit {
                timestamp_ms: i as i64 * 50,
                px: (cx + rng.random_range(-s..s)).clamp(0.0, w - 1e-9),
                py: (cy + rng.random_range(-s..s)).clamp(0.0, h - 1e-9),
            }
        })
        .collect()
}
