//! The corpus manifest: which videos exist, their labels, the frame dumps
//! backing them, and optional landmark sidecars.
//!
//! One JSON document with an explicit `schema_version`. Frame and sidecar
//! paths are stored relative to `corpus_root`; `corpus_root` itself may be
//! relative, in which case it is resolved against the directory holding
//! the manifest file. Serialization is deterministic, so re-running ingest
//! over identical inputs yields a byte-identical file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use betadct_core::Label;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// File name used by the ingest commands inside their output directory.
pub const MANIFEST_FILE_NAME: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("reading {path}: {source}")]
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
    #[error("{path}: schema_version {found}, this build reads {SCHEMA_VERSION}")]
    SchemaMismatch { path: PathBuf, found: u64 },
    #[error("duplicate video_id {0:?}")]
    DuplicateVideoId(String),
    #[error("video {video_id:?}: frame indices are not strictly increasing")]
    UnsortedFrames { video_id: String },
}

/// One dumped frame of one video.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRef {
    /// Image file, relative to the manifest's corpus root.
    pub path: PathBuf,
    pub frame_index: u64,
    pub is_iframe: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoEntry {
    pub video_id: String,
    pub label: Label,
    /// Sorted by `frame_index`, strictly increasing.
    pub frames: Vec<FrameRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landmark_sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoManifest {
    pub schema_version: u32,
    pub corpus_root: PathBuf,
    pub entries: Vec<VideoEntry>,
}

impl VideoManifest {
    pub fn new(corpus_root: impl Into<PathBuf>) -> VideoManifest {
        VideoManifest {
            schema_version: SCHEMA_VERSION,
            corpus_root: corpus_root.into(),
            entries: Vec::new(),
        }
    }

    pub fn entry(&self, video_id: &str) -> Option<&VideoEntry> {
        self.entries.iter().find(|e| e.video_id == video_id)
    }

    /// Checks the structural invariants: unique video ids and strictly
    /// increasing frame indices per video.
    pub fn validate(&self) -> Result<(), ManifestError> {
        let mut seen = BTreeSet::new();
        for entry in &self.entries {
            if !seen.insert(entry.video_id.as_str()) {
                return Err(ManifestError::DuplicateVideoId(entry.video_id.clone()));
            }
            let increasing = entry
                .frames
                .windows(2)
                .all(|w| w[0].frame_index < w[1].frame_index);
            if !increasing {
                return Err(ManifestError::UnsortedFrames {
                    video_id: entry.video_id.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        self.validate()?;
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|source| ManifestError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        bytes.push(b'\n');
        fs::write(path, bytes).map_err(|source| ManifestError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<VideoManifest, ManifestError> {
        let io_err = |source| ManifestError::Io {
            path: path.to_path_buf(),
            source,
        };
        let parse_err = |source| ManifestError::Parse {
            path: path.to_path_buf(),
            source,
        };
        let text = fs::read_to_string(path).map_err(io_err)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
        let found = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0);
        if found != u64::from(SCHEMA_VERSION) {
            return Err(ManifestError::SchemaMismatch {
                path: path.to_path_buf(),
                found,
            });
        }
        let manifest: VideoManifest = serde_json::from_value(value).map_err(parse_err)?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// Resolves a manifest-relative path against the corpus root, which in
    /// turn resolves against `manifest_dir` when relative.
    pub fn resolve(&self, manifest_dir: &Path, relative: &Path) -> PathBuf {
        if relative.is_absolute() {
            return relative.to_path_buf();
        }
        let root = if self.corpus_root.is_absolute() {
            self.corpus_root.clone()
        } else {
            manifest_dir.join(&self.corpus_root)
        };
        root.join(relative)
    }
}
