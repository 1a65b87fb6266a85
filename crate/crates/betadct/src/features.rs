//! The feature pipeline: manifest frames + region masks → β descriptors →
//! per-region CSV tables.
//!
//! Videos are processed in parallel (bounded by the active rayon pool) and
//! merged back in manifest order, so the output is independent of the
//! worker count. Frames without landmark annotations contribute only to
//! the entire-frame region; regions that end up with no valid patches for
//! a video are skipped with a warning rather than zero-filled.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use betadct_core::beta::DEFAULT_MIN_BLOCKS_PER_PATCH;
use betadct_core::classify::DatasetError;
use betadct_core::{
    build_mask, estimate_betas, extract_blocks, patch_vector, video_descriptor, BetaVector,
    Dataset, DatasetRow, Dct8x8, Label, LandmarkSet, RegionKind, RegionMask,
    SpectrumBlock, VideoDescriptor,
};
use log::{debug, info, warn};
use rayon::prelude::*;

use crate::decode::{decode_grayscale, DecodeError};
use crate::landmarks_io::{load_landmarks, LandmarkMap, SidecarError};
use crate::manifest::{VideoEntry, VideoManifest};

pub const FEATURES_DIR_NAME: &str = "features";

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Sidecar(#[from] SidecarError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Table { path: PathBuf, detail: String },
    #[error("feature table {path} for region {region}: {source}")]
    Dataset {
        path: PathBuf,
        region: RegionKind,
        #[source]
        source: DatasetError,
    },
    #[error("no descriptors were produced; check frames and landmark sidecars")]
    NoDescriptors,
    #[error("no feature tables found in {0}")]
    NoTables(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureOptions {
    /// Regions to extract, in output order.
    pub regions: Vec<RegionKind>,
    /// Minimum 8x8 blocks under a mask for a patch to count.
    pub min_blocks: usize,
    /// Pool the blocks of all of a video's frames into one β estimate per
    /// region instead of estimating per frame and averaging.
    pub pooled: bool,
}

impl Default for FeatureOptions {
    fn default() -> FeatureOptions {
        FeatureOptions {
            regions: RegionKind::ALL.to_vec(),
            min_blocks: DEFAULT_MIN_BLOCKS_PER_PATCH,
            pooled: false,
        }
    }
}

/// Region masks materialized once per distinct (landmarks, frame size),
/// since a video's frames usually share one annotation.
struct MaskCache {
    regions: Vec<RegionKind>,
    entries: Vec<(LandmarkSet, u32, u32, Vec<Option<RegionMask>>)>,
}

impl MaskCache {
    fn new(regions: &[RegionKind]) -> MaskCache {
        MaskCache {
            regions: regions.to_vec(),
            entries: Vec::new(),
        }
    }

    fn masks(&mut self, landmarks: &LandmarkSet, width: u32, height: u32) -> &[Option<RegionMask>] {
        let hit = self
            .entries
            .iter()
            .position(|(l, w, h, _)| l == landmarks && *w == width && *h == height);
        let index = hit.unwrap_or_else(|| {
            let masks = self
                .regions
                .iter()
                .map(|&kind| match build_mask(width, height, landmarks, kind) {
                    Ok(mask) => Some(mask),
                    Err(err) => {
                        debug!("{err}; region skipped");
                        None
                    }
                })
                .collect();
            self.entries
                .push((landmarks.clone(), width, height, masks));
            self.entries.len() - 1
        });
        &self.entries[index].3
    }
}

/// All descriptors of one video, keyed by region in `options.regions`
/// order. Missing keys mean the region produced no valid patches.
fn video_descriptors(
    entry: &VideoEntry,
    manifest: &VideoManifest,
    manifest_dir: &Path,
    options: &FeatureOptions,
) -> Result<Vec<(RegionKind, VideoDescriptor)>, FeatureError> {
    let landmarks: LandmarkMap = match &entry.landmark_sidecar {
        Some(sidecar) => load_landmarks(&manifest.resolve(manifest_dir, sidecar))?,
        None => LandmarkMap::new(),
    };
    let mut cache = MaskCache::new(&options.regions);
    let dct = Dct8x8::new();
    let mut patches: Vec<Vec<BetaVector>> = vec![Vec::new(); options.regions.len()];
    let mut pooled_blocks: Vec<Vec<SpectrumBlock>> = vec![Vec::new(); options.regions.len()];

    for frame in &entry.frames {
        let image = decode_grayscale(&manifest.resolve(manifest_dir, &frame.path))?;
        let annotation = landmarks.get(&frame.frame_index);
        for (slot, &region) in options.regions.iter().enumerate() {
            let full;
            let mask: &RegionMask = if region == RegionKind::EntireFrame {
                full = RegionMask::full(image.width(), image.height());
                &full
            } else {
                let Some(landmark_set) = annotation else {
                    continue;
                };
                match &cache.masks(landmark_set, image.width(), image.height())[slot] {
                    Some(mask) => mask,
                    None => continue,
                }
            };
            if options.pooled {
                let blocks = extract_blocks(&image, mask);
                pooled_blocks[slot].extend(blocks.iter().map(|b| dct.spectrum(b)));
            } else if let Some(vector) = patch_vector(&image, mask, options.min_blocks) {
                patches[slot].push(vector);
            } else {
                debug!(
                    "video {} frame {} region {}: below {} blocks, patch skipped",
                    entry.video_id,
                    frame.frame_index,
                    region.as_str(),
                    options.min_blocks
                );
            }
        }
    }

    if options.pooled {
        for (slot, blocks) in pooled_blocks.into_iter().enumerate() {
            if let Ok(vector) = estimate_betas(&blocks, options.min_blocks) {
                patches[slot].push(vector);
            }
        }
    }

    let mut out = Vec::new();
    for (slot, &region) in options.regions.iter().enumerate() {
        match video_descriptor(&entry.video_id, entry.label, region, &patches[slot]) {
            Ok(descriptor) => out.push((region, descriptor)),
            Err(_) => warn!(
                "video {}: no valid patches for region {}, descriptor skipped",
                entry.video_id,
                region.as_str()
            ),
        }
    }
    Ok(out)
}

/// Runs the pipeline over every manifest entry. Returns one descriptor
/// list per region that produced any, in `options.regions` order; within
/// a region, descriptors follow manifest order.
pub fn extract_descriptors(
    manifest: &VideoManifest,
    manifest_dir: &Path,
    options: &FeatureOptions,
) -> Result<Vec<(RegionKind, Vec<VideoDescriptor>)>, FeatureError> {
    let per_video: Vec<Result<Vec<(RegionKind, VideoDescriptor)>, FeatureError>> = manifest
        .entries
        .par_iter()
        .map(|entry| video_descriptors(entry, manifest, manifest_dir, options))
        .collect();

    let mut by_region: BTreeMap<RegionKind, Vec<VideoDescriptor>> = BTreeMap::new();
    for result in per_video {
        for (region, descriptor) in result? {
            by_region.entry(region).or_default().push(descriptor);
        }
    }
    let tables: Vec<(RegionKind, Vec<VideoDescriptor>)> = options
        .regions
        .iter()
        .filter_map(|region| by_region.remove(region).map(|d| (*region, d)))
        .collect();
    if tables.is_empty() {
        return Err(FeatureError::NoDescriptors);
    }
    for (region, descriptors) in &tables {
        info!(
            "region {}: {} video descriptors",
            region.as_str(),
            descriptors.len()
        );
    }
    Ok(tables)
}

/// 17 significant digits: enough to reproduce any f64 exactly on re-parse.
fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn table_err(path: &Path) -> impl FnOnce(csv::Error) -> FeatureError + '_ {
    move |e| FeatureError::Table {
        path: path.to_path_buf(),
        detail: e.to_string(),
    }
}

pub fn feature_csv_header() -> Vec<String> {
    let mut header = vec![
        String::from("video_id"),
        String::from("label"),
        String::from("region"),
        String::from("patch_count"),
    ];
    header.extend((1..=63).map(|i| format!("beta_{i:02}")));
    header
}

pub fn write_feature_csv(path: &Path, descriptors: &[VideoDescriptor]) -> Result<(), FeatureError> {
    let mut writer = csv::Writer::from_path(path).map_err(table_err(path))?;
    writer
        .write_record(feature_csv_header())
        .map_err(table_err(path))?;
    for d in descriptors {
        let mut record = vec![
            d.video_id.clone(),
            d.label.as_str().to_string(),
            d.region.as_str().to_string(),
            d.patch_count.to_string(),
        ];
        record.extend(d.mean_betas.iter().map(|&b| fmt_real(b)));
        writer.write_record(&record).map_err(table_err(path))?;
    }
    writer.flush().map_err(|source| FeatureError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes one `<region>.csv` per table under `out_dir/features/` and
/// returns the paths.
pub fn write_feature_tables(
    out_dir: &Path,
    tables: &[(RegionKind, Vec<VideoDescriptor>)],
) -> Result<Vec<PathBuf>, FeatureError> {
    let dir = out_dir.join(FEATURES_DIR_NAME);
    fs::create_dir_all(&dir).map_err(|source| FeatureError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut paths = Vec::new();
    for (region, descriptors) in tables {
        let path = dir.join(format!("{}.csv", region.as_str()));
        write_feature_csv(&path, descriptors)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Reads one region's feature table back into a classifier dataset.
pub fn read_feature_csv(path: &Path) -> Result<Dataset, FeatureError> {
    let bad = |detail: String| FeatureError::Table {
        path: path.to_path_buf(),
        detail,
    };
    let mut reader = csv::Reader::from_path(path).map_err(table_err(path))?;
    let headers = reader.headers().map_err(table_err(path))?.clone();
    let expected = feature_csv_header();
    if headers.iter().collect::<Vec<_>>() != expected.iter().map(String::as_str).collect::<Vec<_>>()
    {
        return Err(bad(String::from("unexpected header row")));
    }

    let mut region: Option<RegionKind> = None;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(table_err(path))?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let label = Label::parse(field(1))
            .ok_or_else(|| bad(format!("row {}: bad label {:?}", line + 1, field(1))))?;
        let row_region = RegionKind::parse(field(2))
            .ok_or_else(|| bad(format!("row {}: bad region {:?}", line + 1, field(2))))?;
        match region {
            None => region = Some(row_region),
            Some(r) if r == row_region => {}
            Some(r) => {
                return Err(bad(format!(
                    "row {}: region {} in a {} table",
                    line + 1,
                    row_region.as_str(),
                    r.as_str()
                )))
            }
        }
        let mut features = Vec::with_capacity(63);
        for i in 4..record.len() {
            let value: f64 = field(i)
                .parse()
                .map_err(|_| bad(format!("row {}: bad real {:?}", line + 1, field(i))))?;
            features.push(value);
        }
        rows.push(DatasetRow {
            video_id: field(0).to_string(),
            label,
            features,
        });
    }
    let region = region.ok_or_else(|| bad(String::from("table holds no data rows")))?;
    Dataset::new(region, rows).map_err(|source| FeatureError::Dataset {
        path: path.to_path_buf(),
        region,
        source,
    })
}

/// Loads every `<region>.csv` present under `dir`, in canonical region
/// order.
pub fn read_feature_tables(dir: &Path) -> Result<Vec<Dataset>, FeatureError> {
    let mut datasets = Vec::new();
    for region in RegionKind::ALL {
        let path = dir.join(format!("{}.csv", region.as_str()));
        if path.is_file() {
            datasets.push(read_feature_csv(&path)?);
        }
    }
    if datasets.is_empty() {
        return Err(FeatureError::NoTables(dir.to_path_buf()));
    }
    Ok(datasets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn descriptor(id: &str, label: Label, fill: f64) -> VideoDescriptor {
        VideoDescriptor {
            video_id: id.to_string(),
            label,
            region: RegionKind::Face,
            mean_betas: [fill; 63],
            patch_count: 4,
        }
    }

    #[test]
    fn csv_round_trips_features_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("face.csv");
        let descriptors = vec![
            descriptor("a", Label::Real, 1.0 / 3.0),
            descriptor("b", Label::Fake, core::f64::consts::PI),
            descriptor("c", Label::Fake, 1.234_567_890_123_456_7e-12),
        ];
        write_feature_csv(&path, &descriptors).unwrap();
        let dataset = read_feature_csv(&path).unwrap();
        assert_eq!(dataset.region(), RegionKind::Face);
        assert_eq!(dataset.feature_dim(), 63);
        for (row, d) in dataset.rows().iter().zip(&descriptors) {
            assert_eq!(row.video_id, d.video_id);
            assert_eq!(row.label, d.label);
            // Bit-exact after the 17-significant-digit round trip.
            assert_eq!(row.features, d.mean_betas.to_vec());
        }
    }

    #[test]
    fn csv_rejects_mixed_regions_and_bad_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("face.csv");
        let mut descriptors = vec![descriptor("a", Label::Real, 0.5)];
        descriptors.push(VideoDescriptor {
            region: RegionKind::Eyes,
            ..descriptor("b", Label::Fake, 0.5)
        });
        write_feature_csv(&path, &descriptors).unwrap();
        assert!(matches!(
            read_feature_csv(&path),
            Err(FeatureError::Table { .. })
        ));
    }

    #[test]
    fn write_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        let descriptors = vec![
            descriptor("a", Label::Real, 0.1),
            descriptor("b", Label::Fake, 0.7),
        ];
        write_feature_csv(&p1, &descriptors).unwrap();
        write_feature_csv(&p2, &descriptors).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }
}
