use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_json, write_json};
use crate::classifier::TrainedModel;
use crate::error::{Error, Result};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct ModelFileRef<'a> {
    schema_version: u32,
    #[serde(flatten)]
    model: &'a TrainedModel,
}

#[derive(Deserialize)]
struct ModelFile {
    schema_version: u32,
    #[serde(flatten)]
    model: TrainedModel,
}

pub fn write_model(path: &Path, model: &TrainedModel) -> Result<()> {
    write_json(
        path,
        &ModelFileRef {
            schema_version: MODEL_SCHEMA_VERSION,
            model,
        },
    )
}

pub fn read_model(path: &Path) -> Result<TrainedModel> {
    let raw: serde_json::Value = read_json(path)?;
    let found = raw.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0);
    if found != u64::from(MODEL_SCHEMA_VERSION) {
        return Err(Error::VersionMismatch {
            found: found as u32,
            expected: MODEL_SCHEMA_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(raw).map_err(|e| Error::Parse {
        line: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    debug_assert_eq!(file.schema_version, MODEL_SCHEMA_VERSION);
    Ok(file.model)
}
