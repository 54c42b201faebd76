use super::grid::Grid;

/// Discrete Gaussian of odd length `size`, normalised to sum 1.
pub fn gaussian_kernel(sigma: f64, size: usize) -> Vec<f64> {
    assert!(size % 2 == 1, "kernel size must be odd");
    let r = (size / 2) as f64;
    let mut k: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - r;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = k.iter().sum();
    for v in &mut k {
        *v /= total;
    }
    k
}

/// Separable Gaussian convolution with edge replication, no renormalisation.
///
/// Only the nonzero bounding box dilated by the kernel radius is computed;
/// every other output cell reads nothing but zeros and stays zero.
pub fn gaussian_blur_raw(grid: &Grid, sigma: f64, kernel_size: usize) -> Grid {
    let (w, h) = (grid.width(), grid.height());
    let mut out = Grid::zeros(w, h);
    let Some((x0, y0, x1, y1)) = grid.nonzero_bounds() else {
        return out;
    };
    let kernel = gaussian_kernel(sigma, kernel_size);
    let r = kernel_size / 2;

    let (bx0, bx1) = (x0.saturating_sub(r), (x1 + r).min(w - 1));
    let (by0, by1) = (y0.saturating_sub(r), (y1 + r).min(h - 1));
    let span = bx1 - bx0 + 1;

    // horizontal pass over the occupied rows, reading an edge-replicated copy
    let mut padded = vec![0.0; w + 2 * r];
    let mut tmp = Grid::zeros(w, h);
    for y in y0..=y1 {
        let row = grid.row(y);
        padded[..r].fill(row[0]);
        padded[r..r + w].copy_from_slice(row);
        padded[r + w..].fill(row[w - 1]);
        let dst = &mut tmp.data_mut()[y * w + bx0..y * w + bx1 + 1];
        // output column bx0 + x reads padded[bx0 + x ..= bx0 + x + 2r]
        for (k, kv) in kernel.iter().enumerate() {
            let src = &padded[bx0 + k..bx0 + k + span];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += kv * s;
            }
        }
    }

    // vertical pass as row-wise accumulation; rows outside y0..=y1 of tmp are zero
    let mut acc = vec![0.0; span];
    for y in by0..=by1 {
        acc.fill(0.0);
        for (k, kv) in kernel.iter().enumerate() {
            let sy = (y as isize + k as isize - r as isize).clamp(0, h as isize - 1) as usize;
            if sy < y0 || sy > y1 {
                continue;
            }
            let src = &tmp.data()[sy * w + bx0..sy * w + bx1 + 1];
            for (a, s) in acc.iter_mut().zip(src) {
                *a += kv * s;
            }
        }
        out.data_mut()[y * w + bx0..y * w + bx1 + 1].copy_from_slice(&acc);
    }
    out
}

/// Gaussian blur; the output is rescaled to a peak of 1 when the input peak was 1.
pub fn gaussian_blur(grid: &Grid, sigma: f64, kernel_size: usize) -> Grid {
    let mut out = gaussian_blur_raw(grid, sigma, kernel_size);
    if grid.max() == 1.0 {
        let max = out.max();
        if max > 0.0 {
            for v in out.data_mut() {
                *v = (*v / max).min(1.0);
            }
        }
    }
    out
}
