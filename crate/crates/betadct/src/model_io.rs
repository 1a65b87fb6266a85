//! Trained-model files: one JSON document carrying the model, the seed it
//! was trained under, and the region its features came from.

use std::fs;
use std::path::{Path, PathBuf};

use betadct_core::{RegionKind, TrainedModel};
use serde::{Deserialize, Serialize};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: schema_version {found}, this build reads {MODEL_SCHEMA_VERSION}")]
    SchemaMismatch { path: PathBuf, found: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub seed: u64,
    pub region: RegionKind,
    pub model: TrainedModel,
}

impl ModelFile {
    pub fn new(seed: u64, region: RegionKind, model: TrainedModel) -> ModelFile {
        ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            seed,
            region,
            model,
        }
    }
}

pub fn save_model(path: &Path, file: &ModelFile) -> Result<(), ModelIoError> {
    let mut bytes = serde_json::to_vec_pretty(file).map_err(|source| ModelIoError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<ModelFile, ModelIoError> {
    let text = fs::read_to_string(path).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |source| ModelIoError::Parse {
        path: path.to_path_buf(),
        source,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
    let found = value
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .unwrap_or(0);
    if found != u64::from(MODEL_SCHEMA_VERSION) {
        return Err(ModelIoError::SchemaMismatch {
            path: path.to_path_buf(),
            found,
        });
    }
    serde_json::from_value(value).map_err(parse_err)
}
