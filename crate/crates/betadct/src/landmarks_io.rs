//! Landmark sidecar files and the text-format importer.
//!
//! A sidecar is one JSON object mapping frame indices (decimal strings) to
//! arrays of 68 `[x, y]` pairs. The importer converts the common per-frame
//! text format: one file per frame, 68 lines of whitespace-separated
//! "x y"; lines that are not exactly two real numbers (headers, braces)
//! are ignored, and the frame index is the trailing digit run of the file
//! stem.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use betadct_core::landmarks::{LandmarkError, LANDMARK_COUNT};
use betadct_core::{LandmarkSet, Point};

pub type LandmarkMap = BTreeMap<u64, LandmarkSet>;

#[derive(Debug, thiserror::Error)]
pub enum SidecarError {
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
    #[error("{path}: frame key {key:?} is not a decimal integer")]
    BadFrameKey { path: PathBuf, key: String },
    #[error("{path}: frame {frame}: {source}")]
    BadLandmarks {
        path: PathBuf,
        frame: u64,
        #[source]
        source: LandmarkError,
    },
    #[error("{path}: found {got} landmark lines, need exactly {LANDMARK_COUNT}")]
    TextPointCount { path: PathBuf, got: usize },
    #[error("{path}: file stem has no trailing frame number")]
    NoFrameIndex { path: PathBuf },
    #[error("{path}: frame {frame} appears in more than one file")]
    DuplicateFrame { path: PathBuf, frame: u64 },
}

pub fn load_landmarks(path: &Path) -> Result<LandmarkMap, SidecarError> {
    let text = fs::read_to_string(path).map_err(|source| SidecarError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: BTreeMap<String, Vec<[f64; 2]>> =
        serde_json::from_str(&text).map_err(|source| SidecarError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
    let mut map = LandmarkMap::new();
    for (key, pairs) in raw {
        let frame: u64 = key.parse().map_err(|_| SidecarError::BadFrameKey {
            path: path.to_path_buf(),
            key: key.clone(),
        })?;
        let points: Vec<Point> = pairs.iter().map(|&[x, y]| Point::new(x, y)).collect();
        let set = LandmarkSet::new(points).map_err(|source| SidecarError::BadLandmarks {
            path: path.to_path_buf(),
            frame,
            source,
        })?;
        map.insert(frame, set);
    }
    Ok(map)
}

pub fn save_landmarks(path: &Path, landmarks: &LandmarkMap) -> Result<(), SidecarError> {
    let raw: BTreeMap<String, Vec<[f64; 2]>> = landmarks
        .iter()
        .map(|(frame, set)| {
            let pairs: Vec<[f64; 2]> = set.points().iter().map(|p| [p.x, p.y]).collect();
            (frame.to_string(), pairs)
        })
        .collect();
    let mut bytes = serde_json::to_vec_pretty(&raw).map_err(|source| SidecarError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|source| SidecarError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses one per-frame text file: exactly 68 "x y" lines.
pub fn parse_text_landmarks(path: &Path) -> Result<LandmarkSet, SidecarError> {
    let text = fs::read_to_string(path).map_err(|source| SidecarError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut points = Vec::new();
    for line in text.lines() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            continue;
        }
        match (tokens[0].parse::<f64>(), tokens[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push(Point::new(x, y)),
            _ => continue,
        }
    }
    if points.len() != LANDMARK_COUNT {
        return Err(SidecarError::TextPointCount {
            path: path.to_path_buf(),
            got: points.len(),
        });
    }
    LandmarkSet::new(points).map_err(|source| SidecarError::BadLandmarks {
        path: path.to_path_buf(),
        frame: 0,
        source,
    })
}

/// The frame index encoded in a file name: the trailing run of digits of
/// the stem, e.g. "frame_000030.txt" and "30.txt" both give 30.
pub fn frame_index_from_name(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem
        .chars()
        .rev()
        .take_while(char::is_ascii_digit)
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

/// Imports every ".txt" file in `dir` as one annotated frame.
pub fn import_text_dir(dir: &Path) -> Result<LandmarkMap, SidecarError> {
    let read_err = |source| SidecarError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(read_err)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(read_err)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("txt"))
        .collect();
    files.sort();

    let mut map = LandmarkMap::new();
    for file in files {
        let frame = frame_index_from_name(&file).ok_or_else(|| SidecarError::NoFrameIndex {
            path: file.clone(),
        })?;
        let set = parse_text_landmarks(&file)?;
        if map.insert(frame, set).is_some() {
            return Err(SidecarError::DuplicateFrame { path: file, frame });
        }
    }
    Ok(map)
}
