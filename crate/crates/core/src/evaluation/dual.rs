//! Two classifiers on different window lengths combined into one alert stream.
//!
//! The short-window model warns, the long-window model confirms:
//!
//! * `Onset` when the fast model reports distracted while no alert is active;
//! * `Confirmed` when, after an onset, the slow model reports distracted
//!   within `confirm_window_ms` of the onset;
//! * `Cleared` when an alert is active and the latest verdicts of both
//!   models are neutral.
//!
//! Verdicts are merged by time; at equal times the fast verdict goes first.

use serde::{Deserialize, Serialize};

use crate::classifier::TrainedModel;
use crate::error::Result;
use crate::features::{extract_features_with, FeatureConfig};
use crate::geometry::{GazeSample, VirtualWall};
use crate::heatmap::{map_session_windows, HeatmapConfig};
use crate::label::Label;

/// A classifier decision stamped with the end of its window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub time_ms: i64,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AlertKind {
    Onset,
    Confirmed,
    Cleared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alert {
    pub time_ms: i64,
    pub kind: AlertKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Idle,
    Warned { since: i64 },
    Confirmed,
}

pub fn dual_window_combine(fast: &[Verdict], slow: &[Verdict], confirm_window_ms: i64) -> Vec<Alert> {
    let mut events: Vec<(i64, u8, Label)> = fast
        .iter()
        .map(|v| (v.time_ms, 0u8, v.label))
        .chain(slow.iter().map(|v| (v.time_ms, 1u8, v.label)))
        .collect();
    events.sort_by_key(|e| (e.0, e.1));

    let mut alerts = Vec::new();
    let mut state = State::Idle;
    let (mut last_fast, mut last_slow) = (None, None);
    for (t, source, label) in events {
        if source == 0 {
            last_fast = Some(label);
        } else {
            last_slow = Some(label);
        }
        match (state, source, label) {
            (State::Idle, 0, Label::Distracted) => {
                alerts.push(Alert { time_ms: t, kind: AlertKind::Onset });
                state = State::Warned { since: t };
            }
            (State::Warned { since }, 1, Label::Distracted) if t - since <= confirm_window_ms => {
                alerts.push(Alert { time_ms: t, kind: AlertKind::Confirmed });
                state = State::Confirmed;
            }
            _ => {}
        }
        let both_neutral = last_fast == Some(Label::Neutral) && last_slow == Some(Label::Neutral);
        if state != State::Idle && both_neutral {
            alerts.push(Alert { time_ms: t, kind: AlertKind::Cleared });
            state = State::Idle;
        }
    }
    alerts
}

/// Verdict per sliding window of a session, stamped at the window end.
pub fn session_verdicts(
    samples: &[GazeSample],
    wall: &VirtualWall,
    cfg: &HeatmapConfig,
    features: &FeatureConfig,
    model: &TrainedModel,
) -> Result<Vec<Verdict>> {
    map_session_windows(samples, wall, cfg, "", None, |hm| {
        let label = model.classify(&extract_features_with(&hm, features).to_vec())?;
        Ok(Verdict {
            time_ms: hm.window_end_ms,
            label,
        })
    })
    .into_iter()
    .collect()
}
