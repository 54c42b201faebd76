use crate::features::{extract_features_with, FeatureConfig};
use crate::heatmap::{map_session_windows, HeatmapConfig, TimeSpan};
use crate::io::SessionRecording;
use crate::label::Label;

/// One heatmap's features with the metadata fold splitting needs.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub features: Vec<f64>,
    pub label: Label,
    pub driver_id: String,
    /// Identifies the recording the window came from; overlap is only
    /// meaningful between windows of the same session.
    pub session_id: String,
    pub span: TimeSpan,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub rows: Vec<LabeledRow>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// Sorted distinct driver ids.
    pub fn drivers(&self) -> Vec<String> {
        let mut d: Vec<String> = self.rows.iter().map(|r| r.driver_id.clone()).collect();
        d.sort();
        d.dedup();
        d
    }

    pub fn class_count(&self, label: Label) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }
}

/// Heatmaps and features for every window of every session, in session order.
pub fn build_dataset(sessions: &[SessionRecording], cfg: &HeatmapConfig, features: &FeatureConfig) -> Dataset {
    let mut rows = Vec::new();
    for rec in sessions {
        let h = &rec.header;
        let session_id = format!("{}/{}", h.driver_id, h.label);
        let cfg = HeatmapConfig {
            sample_period_ms: h.sample_period_ms,
            ..cfg.clone()
        };
        let part = map_session_windows(&rec.samples, &h.wall, &cfg, &h.driver_id, Some(h.label), |hm| {
            LabeledRow {
                features: extract_features_with(&hm, features).to_vec(),
                label: h.label,
                driver_id: h.driver_id.clone(),
                session_id: session_id.clone(),
                span: TimeSpan::new(hm.window_start_ms, hm.window_end_ms),
            }
        });
        rows.extend(part);
    }
    Dataset { rows }
}
