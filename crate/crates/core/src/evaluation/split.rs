use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::heatmap::TimeSpan;
use crate::label::Label;

/// Train/test partition for one fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Drivers that appear in the test set and nowhere in the training set.
    pub held_out_drivers: BTreeSet<String>,
    /// Training candidates dropped because their window overlaps a test window.
    pub purged: usize,
    /// Set when the fold cannot be evaluated (e.g. a single-class driver).
    pub issue: Option<String>,
}

impl FoldSplit {
    fn finish(dataset: &Dataset, train: Vec<usize>, test: Vec<usize>, purged: usize, mut issue: Option<String>) -> Self {
        let train_drivers: BTreeSet<&str> = train.iter().map(|&i| dataset.rows[i].driver_id.as_str()).collect();
        let held_out_drivers = test
            .iter()
            .map(|&i| dataset.rows[i].driver_id.as_str())
            .filter(|d| !train_drivers.contains(d))
            .map(str::to_owned)
            .collect();
        if issue.is_none() {
            for label in [Label::Neutral, Label::Distracted] {
                if !train.iter().any(|&i| dataset.rows[i].label == label) {
                    issue = Some(format!("training set has no {label} windows"));
                }
            }
        }
        Self {
            train,
            test,
            held_out_drivers,
            purged,
            issue,
        }
    }
}

/// One fold per driver; the test set is exactly that driver's windows.
///
/// A driver whose windows all carry one label still gets a fold, flagged
/// through [`FoldSplit::issue`].
pub fn split_leave_one_driver_out(dataset: &Dataset) -> Result<Vec<FoldSplit>> {
    let drivers = dataset.drivers();
    if drivers.len() < 2 {
        return Err(Error::Data(format!(
            "leave-one-driver-out needs at least 2 drivers, found {}",
            drivers.len()
        )));
    }
    Ok(drivers
        .iter()
        .map(|driver| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..dataset.len()).partition(|&i| dataset.rows[i].driver_id == *driver);
            let labels: BTreeSet<Label> = test.iter().map(|&i| dataset.rows[i].label).collect();
            let issue = (labels.len() < 2).then(|| {
                let only = labels.iter().next().map_or("no", |l| l.as_str());
                format!("driver {driver} has only {only} windows")
            });
            FoldSplit::finish(dataset, train, test, 0, issue)
        })
        .collect())
}

/// Stratified k-fold over windows.
///
/// Each class is ordered by session and time and cut into `k` contiguous
/// chunks of near-equal size; a seeded shuffle assigns chunks to folds, so
/// every fold holds `floor(n_c / k)` or `ceil(n_c / k)` windows of class `c`.
/// Training windows overlapping a test window of the same session are purged.
pub fn split_stratified_kfold(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    let smallest = [Label::Neutral, Label::Distracted]
        .iter()
        .map(|&l| dataset.class_count(l))
        .min()
        .unwrap_or(0);
    if k > smallest {
        return Err(Error::Data(format!("k = {k} exceeds the smallest class count ({smallest})")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; dataset.len()];
    for label in [Label::Neutral, Label::Distracted] {
        let mut idx: Vec<usize> = (0..dataset.len()).filter(|&i| dataset.rows[i].label == label).collect();
        idx.sort_by(|&a, &b| {
            let (ra, rb) = (&dataset.rows[a], &dataset.rows[b]);
            (&ra.session_id, ra.span.start_ms, a).cmp(&(&rb.session_id, rb.span.start_ms, b))
        });
        let mut chunk_to_fold: Vec<usize> = (0..k).collect();
        chunk_to_fold.shuffle(&mut rng);
        let n = idx.len();
        for (chunk, &fold) in chunk_to_fold.iter().enumerate() {
            let (lo, hi) = (chunk * n / k, (chunk + 1) * n / k);
            for &i in &idx[lo..hi] {
                fold_of[i] = fold;
            }
        }
    }

    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let test: Vec<usize> = (0..dataset.len()).filter(|&i| fold_of[i] == fold).collect();
        let mut test_spans: BTreeMap<&str, Vec<TimeSpan>> = BTreeMap::new();
        for &i in &test {
            let r = &dataset.rows[i];
            test_spans.entry(r.session_id.as_str()).or_default().push(r.span);
        }
        for spans in test_spans.values_mut() {
            spans.sort_by_key(|s| s.start_ms);
        }
        let mut train = Vec::new();
        let mut purged = 0;
        for i in (0..dataset.len()).filter(|&i| fold_of[i] != fold) {
            let r = &dataset.rows[i];
            if overlaps_any(test_spans.get(r.session_id.as_str()), &r.span) {
                purged += 1;
            } else {
                train.push(i);
            }
        }
        folds.push(FoldSplit::finish(dataset, train, test, purged, None));
    }
    Ok(folds)
}

fn overlaps_any(sorted: Option<&Vec<TimeSpan>>, span: &TimeSpan) -> bool {
    let Some(spans) = sorted else {
        return false;
    };
    // first span starting at or after span.end cannot overlap; check the ones before it
    let hi = spans.partition_point(|s| s.start_ms < span.end_ms);
    spans[..hi].iter().rev().any(|s| s.overlaps(span))
}
