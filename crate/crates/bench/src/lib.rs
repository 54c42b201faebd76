//! Shared fixtures for the criterion benches.

use gazewall::geometry::project_all;
use gazewall::heatmap::{heatmap_from_hits, TimeSpan};
use gazewall::synth::{simulate_session, BehaviorProfile, SessionSpec};
use gazewall::{Heatmap, HeatmapConfig, Label, VirtualWall, WallHit};

/// Wall hits of the first `window_s` seconds of a simulated session.
pub fn window_hits(label: Label, window_s: u32, seed: u64) -> Vec<WallHit> {
    let spec = SessionSpec::new("bench", BehaviorProfile::default_for(label), window_s, seed);
    let samples = simulate_session(&spec).expect("default spec is valid");
    project_all(&samples, &VirtualWall::default())
}

pub fn heatmap(label: Label, window_s: u32, seed: u64) -> Heatmap {
    let hits = window_hits(label, window_s, seed);
    let cfg = HeatmapConfig::with_window(window_s);
    let span = TimeSpan::new(0, cfg.window_ms());
    heatmap_from_hits(&hits, span, &VirtualWall::default(), &cfg, "bench", Some(label))
}
