//! Everything around `betadct-core` that touches the outside world: frame
//! manifests, image decoding, subprocess demuxing, landmark sidecar files,
//! the feature CSV tables, model files, evaluation reports, and the batch
//! CLI that chains them.
//!
//! Pipeline stages communicate only through on-disk artifacts (manifest,
//! sidecars, feature CSVs, split file, model files, reports), so any stage
//! can be rerun or replaced independently.

#![forbid(unsafe_code)]

pub mod cli;
pub mod config;
pub mod decode;
pub mod features;
pub mod fixture;
pub mod ingest;
pub mod landmarks_io;
pub mod manifest;
pub mod model_io;
pub mod report;
