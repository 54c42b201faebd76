/// Squared Euclidean distance.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Radial basis function kernel `exp(-gamma * |a - b|^2)`.
///
/// Panics if the slices differ in length.
#[inline]
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "kernel arguments differ in length");
    (-gamma * squared_distance(a, b)).exp()
}
