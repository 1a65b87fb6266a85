//! Run configuration for the `run-all` pipeline command, and the mapping
//! from classifier names to grid entries shared with the CLI flags.

use std::fs;
use std::path::{Path, PathBuf};

use betadct_core::beta::DEFAULT_MIN_BLOCKS_PER_PATCH;
use betadct_core::{ClassifierGridEntry, ClassifierSpec, Label, RegionKind};
use serde::{Deserialize, Serialize};

use crate::ingest::DEFAULT_DEMUXER;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
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
    #[error("config needs exactly one of \"videos\" or \"frames\"")]
    NoCorpus,
    #[error("region list is empty")]
    NoRegions,
    #[error("unknown region {0:?}")]
    UnknownRegion(String),
    #[error("classifier list is empty")]
    NoClassifiers,
    #[error("unknown classifier {0:?} (expected knn, knn_<k>, lda, decision_tree, random_forest)")]
    UnknownClassifier(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridLayout {
    /// One report row per hyperparameter setting.
    #[default]
    PerSetting,
    /// One row per family; k-NN's k is chosen on the validation split.
    Family,
}

impl GridLayout {
    pub fn parse(s: &str) -> Option<GridLayout> {
        match s {
            "per-setting" | "per_setting" => Some(GridLayout::PerSetting),
            "family" => Some(GridLayout::Family),
            _ => None,
        }
    }
}

fn default_regions() -> Vec<String> {
    RegionKind::ALL.iter().map(|r| r.as_str().to_string()).collect()
}

fn default_classifiers() -> Vec<String> {
    ["knn", "lda", "decision_tree", "random_forest"]
        .map(String::from)
        .to_vec()
}

fn default_min_blocks() -> usize {
    DEFAULT_MIN_BLOCKS_PER_PATCH
}

/// The `run-all` configuration. `seed` and `out_dir` are deliberately
/// required: every random choice in a run derives from that one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Directory of video files to demux (class subdirs or `label`).
    #[serde(default)]
    pub videos: Option<PathBuf>,
    /// Directory of pre-dumped frames, every image an I-frame.
    #[serde(default)]
    pub frames: Option<PathBuf>,
    /// Single class for unlabeled corpus layouts.
    #[serde(default)]
    pub label: Option<Label>,
    /// Directory of `<video_id>.json` sidecars to attach after ingest.
    #[serde(default)]
    pub landmarks: Option<PathBuf>,
    #[serde(default = "default_demuxer")]
    pub demuxer: String,
    #[serde(default = "default_regions")]
    pub regions: Vec<String>,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<String>,
    #[serde(default)]
    pub grid_layout: GridLayout,
    #[serde(default = "default_min_blocks")]
    pub min_blocks_per_patch: usize,
    #[serde(default)]
    pub pooled: bool,
    /// Keep at most this many frames per video.
    #[serde(default)]
    pub max_frames: Option<usize>,
    /// Worker threads; the --jobs flag wins when both are given.
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Log filter; the --log-level flag wins when both are given.
    #[serde(default)]
    pub log_level: Option<String>,
    /// Corpus label recorded in the grid for sub-grid reports.
    #[serde(default)]
    pub corpus_tag: Option<String>,
}

fn default_demuxer() -> String {
    DEFAULT_DEMUXER.to_string()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.videos.is_some() == self.frames.is_some() {
            return Err(ConfigError::NoCorpus);
        }
        parse_regions(&self.regions)?;
        build_grid(&self.classifiers, self.grid_layout)?;
        Ok(())
    }
}

pub fn parse_regions(names: &[String]) -> Result<Vec<RegionKind>, ConfigError> {
    if names.is_empty() {
        return Err(ConfigError::NoRegions);
    }
    names
        .iter()
        .map(|name| {
            RegionKind::parse(name).ok_or_else(|| ConfigError::UnknownRegion(name.clone()))
        })
        .collect()
}

/// Settings competing under one classifier name. "knn" is the whole k
/// grid; "knn_<k>" pins one k; the rest are single settings.
pub fn classifier_settings(name: &str) -> Option<Vec<ClassifierSpec>> {
    if name == "knn" {
        return Some(
            ClassifierSpec::KNN_KS
                .iter()
                .map(|&k| ClassifierSpec::Knn { k })
                .collect(),
        );
    }
    if let Some(k) = name.strip_prefix("knn_") {
        let k: usize = k.parse().ok().filter(|&k| k >= 1)?;
        return Some(vec![ClassifierSpec::Knn { k }]);
    }
    match name {
        "lda" => Some(vec![ClassifierSpec::Lda]),
        "decision_tree" => Some(vec![ClassifierSpec::DecisionTree]),
        "random_forest" => Some(vec![ClassifierSpec::RandomForest(Default::default())]),
        _ => None,
    }
}

/// Expands classifier names into grid rows. Under the per-setting layout
/// the "knn" family fans out into six rows; under the family layout it
/// stays one row whose k is picked on validation.
pub fn build_grid(
    names: &[String],
    layout: GridLayout,
) -> Result<Vec<ClassifierGridEntry>, ConfigError> {
    if names.is_empty() {
        return Err(ConfigError::NoClassifiers);
    }
    let mut grid = Vec::new();
    for name in names {
        let settings = classifier_settings(name)
            .ok_or_else(|| ConfigError::UnknownClassifier(name.clone()))?;
        match layout {
            GridLayout::PerSetting => {
                grid.extend(settings.into_iter().map(ClassifierGridEntry::single));
            }
            GridLayout::Family => grid.push(ClassifierGridEntry {
                name: name.clone(),
                settings,
            }),
        }
    }
    Ok(grid)
}
