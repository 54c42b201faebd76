//! Vehicle-frame geometry.
//!
//! The vehicle frame is right-handed with x pointing right, y up and z
//! forward, in meters, with the origin at the navigation screen. The virtual
//! wall is a rectangle whose normal faces the driver; wall-local coordinates
//! `(u, v)` run rightward and upward from the wall center.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rays with `|dir . normal|` at or below this are treated as parallel.
pub const PARALLEL_EPS: f64 = 1e-9;

/// Maximum distance from the wall plane accepted by [`wall_point_to_pixel`].
pub const ON_PLANE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector in the same direction. The zero vector is returned as is.
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// One gaze observation from the tracker.
///
/// When `valid` is false the tracker produced no estimate and
/// `gaze_direction` carries no meaning (the simulator writes the zero vector).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub timestamp_ms: i64,
    pub head_position: Vec3,
    pub gaze_direction: Vec3,
    pub valid: bool,
}

impl GazeSample {
    pub fn invalid(timestamp_ms: i64, head_position: Vec3) -> Self {
        Self {
            timestamp_ms,
            head_position,
            gaze_direction: Vec3::ZERO,
            valid: false,
        }
    }
}

/// Orthonormal in-plane axes `(right, up)` for a plane with the given normal.
fn plane_axes(normal: Vec3) -> (Vec3, Vec3) {
    let hint = if normal.cross(Vec3::new(0.0, 1.0, 0.0)).norm() > 1e-6 {
        Vec3::new(0.0, 1.0, 0.0)
    } else {
        Vec3::new(0.0, 0.0, 1.0)
    };
    let right = normal.cross(hint).normalized();
    let up = right.cross(normal);
    (right, up)
}

/// Ray parameter `t` of the intersection with the plane through `center`
/// with `normal`, if the ray is not parallel and hits in front of its origin.
fn ray_plane_t(origin: Vec3, dir: Vec3, center: Vec3, normal: Vec3) -> Option<f64> {
    let denom = dir.dot(normal);
    if denom.abs() <= PARALLEL_EPS {
        return None;
    }
    let t = (center - origin).dot(normal) / denom;
    (t > 0.0).then_some(t)
}

/// The imaginary plane the gaze is projected onto.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualWall {
    pub center: Vec3,
    pub normal: Vec3,
    pub physical_width: f64,
    pub physical_height: f64,
    pub grid_width: usize,
    pub grid_height: usize,
}

impl Default for VirtualWall {
    /// 4.15 m x 2.59 m wall 4 m ahead of the origin, rasterised at 640 x 400.
    fn default() -> Self {
        Self {
            center: Vec3::new(0.0, 0.0, 4.0),
            normal: Vec3::new(0.0, 0.0, -1.0),
            physical_width: 4.15,
            physical_height: 2.59,
            grid_width: 640,
            grid_height: 400,
        }
    }
}

impl VirtualWall {
    pub fn validate(&self) -> Result<()> {
        if !(self.physical_width > 0.0 && self.physical_height > 0.0) {
            return Err(Error::Config("wall physical extent must be positive".into()));
        }
        if self.grid_width == 0 || self.grid_height == 0 {
            return Err(Error::Config("wall grid dimensions must be positive".into()));
        }
        if !self.center.is_finite() || (self.normal.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Config("wall normal must be a unit vector".into()));
        }
        Ok(())
    }

    /// `(right, up)` unit axes of the wall in the vehicle frame.
    pub fn axes(&self) -> (Vec3, Vec3) {
        plane_axes(self.normal)
    }

    /// Vehicle-frame point for wall-local coordinates `(u, v)`.
    pub fn local_to_point(&self, u: f64, v: f64) -> Vec3 {
        let (right, up) = self.axes();
        self.center + right * u + up * v
    }

    /// Pixel coordinates for wall-local `(u, v)`, without bounds checks.
    pub fn local_to_pixel(&self, u: f64, v: f64) -> (f64, f64) {
        let px = (u / self.physical_width + 0.5) * self.grid_width as f64;
        let py = (0.5 - v / self.physical_height) * self.grid_height as f64;
        (px, py)
    }

    /// Inverse of [`VirtualWall::local_to_pixel`].
    pub fn pixel_to_local(&self, px: f64, py: f64) -> (f64, f64) {
        let u = (px / self.grid_width as f64 - 0.5) * self.physical_width;
        let v = (0.5 - py / self.grid_height as f64) * self.physical_height;
        (u, v)
    }

    /// Vehicle-frame point on the wall for a pixel position.
    pub fn pixel_to_point(&self, px: f64, py: f64) -> Vec3 {
        let (u, v) = self.pixel_to_local(px, py);
        self.local_to_point(u, v)
    }

    fn in_grid(&self, px: f64, py: f64) -> bool {
        px >= 0.0 && py >= 0.0 && px < self.grid_width as f64 && py < self.grid_height as f64
    }
}

/// Continuous pixel position on the wall grid (row 0 at the top).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pixel {
    pub x: f64,
    pub y: f64,
}

/// A gaze sample that landed on the wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallHit {
    pub timestamp_ms: i64,
    pub px: f64,
    pub py: f64,
}

/// Intersection of the sample's gaze ray with the wall plane.
///
/// Returns `None` for invalid samples, rays parallel to the plane and rays
/// pointing away from it. The wall's finite extent is not checked here.
pub fn intersect_ray_plane(sample: &GazeSample, wall: &VirtualWall) -> Option<Vec3> {
    if !sample.valid {
        return None;
    }
    let t = ray_plane_t(sample.head_position, sample.gaze_direction, wall.center, wall.normal)?;
    Some(sample.head_position + sample.gaze_direction * t)
}

/// Maps a point on the wall plane to pixel coordinates.
///
/// Errors when `p` is further than [`ON_PLANE_EPS`] from the plane; returns
/// `Ok(None)` when the point lies outside the wall rectangle.
pub fn wall_point_to_pixel(p: Vec3, wall: &VirtualWall) -> Result<Option<Pixel>> {
    let offset = p - wall.center;
    let dist = offset.dot(wall.normal);
    if dist.abs() >= ON_PLANE_EPS {
        return Err(Error::Data(format!("point is {dist:e} m off the wall plane")));
    }
    let (right, up) = wall.axes();
    let (px, py) = wall.local_to_pixel(offset.dot(right), offset.dot(up));
    Ok(wall.in_grid(px, py).then_some(Pixel { x: px, y: py }))
}

/// Full projection of one sample onto the wall grid.
pub fn project_sample(sample: &GazeSample, wall: &VirtualWall) -> Option<WallHit> {
    if !sample.valid {
        return None;
    }
    let t = ray_plane_t(sample.head_position, sample.gaze_direction, wall.center, wall.normal)?;
    // Expressed relative to the wall center so that translating head and wall
    // together leaves the result unchanged.
    let local = (sample.head_position - wall.center) + sample.gaze_direction * t;
    let (right, up) = wall.axes();
    let (px, py) = wall.local_to_pixel(local.dot(right), local.dot(up));
    wall.in_grid(px, py).then_some(WallHit {
        timestamp_ms: sample.timestamp_ms,
        px,
        py,
    })
}

/// Projects every sample, keeping only the ones that land on the wall.
pub fn project_all(samples: &[GazeSample], wall: &VirtualWall) -> Vec<WallHit> {
    samples.iter().filter_map(|s| project_sample(s, wall)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AoiKind {
    LeftMirror,
    RightMirror,
    CentralMirror,
    InstrumentCluster,
    Custom,
}

/// Rectangular interior object (mirror, cluster) used for hit testing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AoiRect {
    pub name: AoiKind,
    pub center: Vec3,
    /// Half width and half height in meters along the rectangle's own axes.
    pub half_extents: [f64; 2],
    pub normal: Vec3,
}

impl AoiRect {
    pub fn new(name: AoiKind, center: Vec3, half_extents: [f64; 2], normal: Vec3) -> Result<Self> {
        if !(half_extents[0] > 0.0 && half_extents[1] > 0.0) {
            return Err(Error::Config(format!("{name:?}: half extents must be positive")));
        }
        if (normal.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("{name:?}: normal must be a unit vector")));
        }
        Ok(Self {
            name,
            center,
            half_extents,
            normal,
        })
    }

    /// `(right, up)` in-plane axes; the half extents are measured along these.
    pub fn axes(&self) -> (Vec3, Vec3) {
        plane_axes(self.normal)
    }

    /// Vehicle-frame point for rectangle-local `(a, b)`.
    pub fn local_to_point(&self, a: f64, b: f64) -> Vec3 {
        let (right, up) = self.axes();
        self.center + right * a + up * b
    }

    /// Default cabin layout relative to the navigation screen origin.
    pub fn default_cabin() -> Vec<AoiRect> {
        let facing = |from: Vec3| (Vec3::new(-0.4, 0.25, -0.6) - from).normalized();
        let mk = |name, center: Vec3, half: [f64; 2]| AoiRect {
            name,
            center,
            half_extents: half,
            normal: facing(center),
        };
        vec![
            mk(AoiKind::LeftMirror, Vec3::new(-1.0, 0.15, -0.35), [0.1, 0.06]),
            mk(AoiKind::RightMirror, Vec3::new(0.95, 0.15, -0.3), [0.1, 0.06]),
            mk(AoiKind::CentralMirror, Vec3::new(0.0, 0.5, -0.2), [0.13, 0.04]),
            mk(AoiKind::InstrumentCluster, Vec3::new(-0.4, -0.15, -0.25), [0.2, 0.08]),
        ]
    }
}

/// Whether the sample's gaze ray passes through the rectangle.
pub fn aoi_hit(sample: &GazeSample, aoi: &AoiRect) -> bool {
    if !sample.valid {
        return false;
    }
    let Some(t) = ray_plane_t(sample.head_position, sample.gaze_direction, aoi.center, aoi.normal)
    else {
        return false;
    };
    let local = (sample.head_position - aoi.center) + sample.gaze_direction * t;
    let (right, up) = aoi.axes();
    local.dot(right).abs() <= aoi.half_extents[0] && local.dot(up).abs() <= aoi.half_extents[1]
}
