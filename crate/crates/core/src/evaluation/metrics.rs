use crate::label::Label;

/// Counts indexed `[actual][predicted]`, neutral first.
pub type Confusion = [[u64; 2]; 2];

pub fn confusion_counts(pairs: impl IntoIterator<Item = (Label, Label)>) -> Confusion {
    let mut m = [[0u64; 2]; 2];
    for (actual, predicted) in pairs {
        m[actual.index()][predicted.index()] += 1;
    }
    m
}

/// Row-normalised matrix; rows without samples are `None`.
pub fn row_normalize(m: &Confusion) -> [Option<[f64; 2]>; 2] {
    m.map(|row| {
        let total = row[0] + row[1];
        (total > 0).then(|| [row[0] as f64 / total as f64, row[1] as f64 / total as f64])
    })
}

pub fn accuracy(m: &Confusion) -> f64 {
    let total: u64 = m.iter().flatten().sum();
    if total == 0 {
        0.0
    } else {
        (m[0][0] + m[1][1]) as f64 / total as f64
    }
}

/// F1 of the distracted class; 0 when there are neither true nor predicted positives.
pub fn f1_score(m: &Confusion) -> f64 {
    let tp = m[1][1] as f64;
    let denom = 2.0 * tp + m[0][1] as f64 + m[1][0] as f64;
    if denom == 0.0 {
        0.0
    } else {
        2.0 * tp / denom
    }
}

/// Two-by-two table with actual classes as rows, predicted as columns.
pub fn format_confusion(m: &[[f64; 2]; 2]) -> String {
    format!(
        "                      Predicted\n\
         {:>20}  {:>10}  {:>10}\n\
         Actual {:>13}  {:>10.3}  {:>10.3}\n\
         {:>20}  {:>10.3}  {:>10.3}\n",
        "", "Neutral", "Distracted", "Neutral", m[0][0], m[0][1], "Distracted", m[1][0], m[1][1]
    )
}
