//! Synthetic end-to-end corpus: textured "real" videos against "fake"
//! twins whose face interior has been low-pass filtered.
//!
//! Each index i yields a real/fake pair sharing the same noise frames and
//! the same jittered synthetic face; the fake copy box-blurs the pixels
//! under its face mask, crushing the high-frequency DCT energy there the
//! way resynthesized face interiors do. All randomness derives from the
//! seed through fixed per-video streams, so the corpus is reproducible
//! byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use betadct_core::landmarks::synthetic_face;
use betadct_core::{build_mask, GrayImage, Label, LandmarkSet, RegionKind, RegionMask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decode::encode_png;
use crate::landmarks_io::{save_landmarks, LandmarkMap, SidecarError};
use crate::manifest::{FrameRef, VideoEntry, VideoManifest, MANIFEST_FILE_NAME};

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Sidecar(#[from] SidecarError),
    #[error(transparent)]
    Manifest(#[from] crate::manifest::ManifestError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureOptions {
    pub videos_per_class: usize,
    pub frames_per_video: usize,
    pub width: u32,
    pub height: u32,
    pub seed: u64,
}

impl Default for FixtureOptions {
    fn default() -> FixtureOptions {
        FixtureOptions {
            videos_per_class: 40,
            frames_per_video: 3,
            width: 256,
            height: 256,
            seed: 0,
        }
    }
}

// Stream offsets keep geometry and texture draws independent.
const GEOMETRY_STREAMS: u64 = 1 << 20;
const TEXTURE_STREAMS: u64 = 1 << 21;

fn noise_frame(width: u32, height: u32, rng: &mut ChaCha8Rng) -> GrayImage {
    let mut data = vec![0u8; (width * height) as usize];
    rng.fill(&mut data[..]);
    GrayImage::from_raw(width, height, data).expect("length matches dimensions")
}

/// 3x3 box blur of `source` applied only where `mask` is set, borders
/// clamped, round half up.
fn blur_under_mask(source: &GrayImage, mask: &RegionMask) -> GrayImage {
    let (width, height) = (source.width(), source.height());
    let mut out = source.clone();
    for y in 0..height {
        for x in 0..width {
            if !mask.get(x, y) {
                continue;
            }
            let mut sum = 0u32;
            let mut count = 0u32;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx >= 0 && ny >= 0 && nx < width as i64 && ny < height as i64 {
                        sum += u32::from(source.get(nx as u32, ny as u32));
                        count += 1;
                    }
                }
            }
            out.set(x, y, ((2 * sum + count) / (2 * count)) as u8);
        }
    }
    out
}

/// Per-pair face geometry: centered, with mild jitter so video extents
/// differ while every part region keeps enough 8x8 blocks.
fn jittered_face(options: &FixtureOptions, rng: &mut ChaCha8Rng) -> LandmarkSet {
    let (w, h) = (options.width as f64, options.height as f64);
    let cx = w * 0.5 + rng.random_range(-6.0..6.0);
    let cy = h * 0.5 + rng.random_range(-6.0..6.0);
    let half_width = w * 0.34 * rng.random_range(0.94..1.06);
    let half_height = h * 0.40 * rng.random_range(0.94..1.06);
    synthetic_face(cx, cy, half_width, half_height)
}

/// Generates the corpus under `out_dir` (frames, landmark sidecars, and
/// manifest) and returns the manifest that was written.
pub fn generate_fixture(
    out_dir: &Path,
    options: &FixtureOptions,
) -> Result<VideoManifest, FixtureError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| FixtureError::Io { path, source }
    };
    let landmarks_dir = out_dir.join("landmarks");
    fs::create_dir_all(&landmarks_dir).map_err(io_err(&landmarks_dir))?;

    let mut manifest = VideoManifest::new(".");
    for label in [Label::Real, Label::Fake] {
        for index in 0..options.videos_per_class {
            let video_id = format!("{label}_{index:03}");
            let frames_dir = out_dir.join("frames").join(label.as_str()).join(format!("{index:03}"));
            fs::create_dir_all(&frames_dir).map_err(io_err(&frames_dir))?;

            let mut geometry_rng = ChaCha8Rng::seed_from_u64(options.seed);
            geometry_rng.set_stream(GEOMETRY_STREAMS + index as u64);
            let landmarks = jittered_face(options, &mut geometry_rng);
            let face_mask = build_mask(options.width, options.height, &landmarks, RegionKind::Face)
                .expect("the synthetic face is never degenerate");

            let mut sidecar = LandmarkMap::new();
            let mut frames = Vec::new();
            for frame_index in 0..options.frames_per_video {
                let mut texture_rng = ChaCha8Rng::seed_from_u64(options.seed);
                texture_rng
                    .set_stream(TEXTURE_STREAMS + (index * options.frames_per_video + frame_index) as u64);
                let base = noise_frame(options.width, options.height, &mut texture_rng);
                let image = match label {
                    Label::Real => base,
                    Label::Fake => blur_under_mask(&base, &face_mask),
                };
                let file = frames_dir.join(format!("{frame_index:06}.png"));
                encode_png(&file, &image).map_err(|source| FixtureError::Encode {
                    path: file.clone(),
                    source,
                })?;
                frames.push(FrameRef {
                    path: file
                        .strip_prefix(out_dir)
                        .expect("frame dir lives under the fixture root")
                        .to_path_buf(),
                    frame_index: frame_index as u64,
                    is_iframe: true,
                });
                sidecar.insert(frame_index as u64, landmarks.clone());
            }

            let sidecar_path = landmarks_dir.join(format!("{video_id}.json"));
            save_landmarks(&sidecar_path, &sidecar)?;
            manifest.entries.push(VideoEntry {
                video_id,
                label,
                frames,
                landmark_sidecar: Some(
                    sidecar_path
                        .strip_prefix(out_dir)
                        .expect("landmarks dir lives under the fixture root")
                        .to_path_buf(),
                ),
            });
        }
    }
    manifest.save(&out_dir.join(MANIFEST_FILE_NAME))?;
    Ok(manifest)
}
