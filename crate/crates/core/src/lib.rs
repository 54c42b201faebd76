//! Cognitive-distraction detection from eye-gaze streams.
//!
//! Gaze rays are projected onto a virtual wall ahead of the vehicle, the
//! intersections of each sliding time window are turned into a blurred
//! dispersion heatmap, the heatmap is reduced to a fixed 75-value feature
//! vector, and an RBF-kernel max-margin classifier separates neutral from
//! distracted driving.
//!
//! The crate is organised along that pipeline:
//!
//! * [`geometry`]: ray/plane intersection, wall pixel mapping, AOI hit tests.
//! * [`heatmap`]: windowing, circle stamping, normalisation and Gaussian blur.
//! * [`features`]: intensity histogram, zone statistics, standardisation.
//! * [`classifier`]: RBF kernel and an SMO solver.
//! * [`evaluation`]: fold splitting, cross-validation, window sweeps and the
//!   dual-window alert combiner.
//! * [`synth`]: seeded simulator producing labelled gaze sessions.
//! * [`io`]: session, heatmap, feature, model and report file formats.

pub mod classifier;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod geometry;
pub mod heatmap;
pub mod io;
pub mod synth;

mod label;

pub use classifier::{KernelParams, SmoParams, TrainedModel};
pub use error::{Error, Result};
pub use features::{FeatureConfig, FeatureScaler, FeatureVector, Standardization, ZoneStats, FEATURE_LEN};
pub use geometry::{AoiKind, AoiRect, GazeSample, Vec3, VirtualWall, WallHit};
pub use heatmap::{Grid, Heatmap, HeatmapConfig};
pub use label::Label;
