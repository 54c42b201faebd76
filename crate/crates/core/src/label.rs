use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Driving state annotation. `Distracted` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Neutral,
    Distracted,
}

impl Label {
    /// Classifier target: -1 for neutral, +1 for distracted.
    pub fn sign(self) -> f64 {
        match self {
            Label::Neutral => -1.0,
            Label::Distracted => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Neutral => "neutral",
            Label::Distracted => "distracted",
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Label::Neutral => 0,
            Label::Distracted => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "neutral" => Ok(Label::Neutral),
            "distracted" => Ok(Label::Distracted),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown label `{other}`"),
            }),
        }
    }
}
