//! Corpus ingestion: the external-demuxer path for real videos and the
//! all-frames policy for pre-dumped image directories.
//!
//! I-frame extraction is delegated to a subprocess described by a command
//! template with `{input}` and `{outdir}` placeholders. The template is
//! split on whitespace before substitution and executed directly, never
//! through a shell, so paths containing spaces stay intact.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use betadct_core::Label;
use log::{info, warn};

use crate::manifest::{FrameRef, ManifestError, VideoEntry, VideoManifest, MANIFEST_FILE_NAME};

/// Dumps I-frames with their display index as the file name.
pub const DEFAULT_DEMUXER: &str = "ffmpeg -nostdin -loglevel error -i {input} -vf select=eq(pict_type\\,I) -fps_mode vfr -frame_pts 1 {outdir}/%06d.png";

const VIDEO_EXTENSIONS: [&str; 9] = [
    "avi", "m4v", "mkv", "mov", "mp4", "mpeg", "mpg", "ts", "webm",
];
const IMAGE_EXTENSIONS: [&str; 9] = [
    "bmp", "jpeg", "jpg", "pgm", "png", "pnm", "ppm", "tif", "tiff",
];

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("input path {0} does not exist")]
    MissingInput(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("demuxer failed on {input}: {detail}")]
    DemuxerFailed { input: PathBuf, detail: String },
    #[error("no videos found under {0}")]
    NoVideos(PathBuf),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
}

/// One video file queued for demuxing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoSource {
    pub video_id: String,
    pub path: PathBuf,
    pub label: Label,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn has_extension(path: &Path, extensions: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .is_some_and(|e| extensions.contains(&e.as_str()))
}

fn sorted_dir(dir: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(dir))?
        .into_iter()
        .map(|e| e.path())
        .collect();
    paths.sort();
    Ok(paths)
}

fn file_stem_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| String::from("video"))
}

/// Lists the video files under `dir`. With a label, every video file
/// directly inside `dir` belongs to that class and the id is the file
/// stem; without one, `dir` must hold `real/` and `fake/` subdirectories
/// and ids are prefixed with the class.
pub fn collect_video_sources(
    dir: &Path,
    label: Option<Label>,
) -> Result<Vec<VideoSource>, IngestError> {
    if !dir.is_dir() {
        return Err(IngestError::MissingInput(dir.to_path_buf()));
    }
    let mut sources = Vec::new();
    match label {
        Some(label) => {
            for path in sorted_dir(dir)? {
                if path.is_file() && has_extension(&path, &VIDEO_EXTENSIONS) {
                    sources.push(VideoSource {
                        video_id: file_stem_id(&path),
                        path,
                        label,
                    });
                }
            }
        }
        None => {
            for label in [Label::Real, Label::Fake] {
                let class_dir = dir.join(label.as_str());
                if !class_dir.is_dir() {
                    continue;
                }
                for path in sorted_dir(&class_dir)? {
                    if path.is_file() && has_extension(&path, &VIDEO_EXTENSIONS) {
                        sources.push(VideoSource {
                            video_id: format!("{label}_{}", file_stem_id(&path)),
                            path,
                            label,
                        });
                    }
                }
            }
        }
    }
    if sources.is_empty() {
        return Err(IngestError::NoVideos(dir.to_path_buf()));
    }
    Ok(sources)
}

/// Substitutes the placeholders and runs the demuxer without a shell.
fn run_demuxer(template: &str, input: &Path, outdir: &Path) -> Result<(), IngestError> {
    let failed = |detail: String| IngestError::DemuxerFailed {
        input: input.to_path_buf(),
        detail,
    };
    let argv: Vec<String> = template
        .split_whitespace()
        .map(|token| {
            token
                .replace("{input}", &input.to_string_lossy())
                .replace("{outdir}", &outdir.to_string_lossy())
        })
        .collect();
    let (program, args) = argv
        .split_first()
        .ok_or_else(|| failed(String::from("empty demuxer command template")))?;
    let output = Command::new(program)
        .args(args)
        .stdin(std::process::Stdio::null())
        .output()
        .map_err(|e| failed(format!("could not run {program:?}: {e}")))?;
    if !output.status.success() {
        let mut stderr = String::from_utf8_lossy(&output.stderr).into_owned();
        stderr.truncate(500);
        return Err(failed(format!("exit {}: {}", output.status, stderr.trim())));
    }
    Ok(())
}

/// Frame files dumped into `dir`, as manifest refs relative to `base`.
/// Indices come from trailing digit runs in the file names when those are
/// strictly increasing in name order, else from file positions.
fn scan_dump_dir(dir: &Path, base: &Path) -> Result<Vec<FrameRef>, IngestError> {
    let files: Vec<PathBuf> = sorted_dir(dir)?
        .into_iter()
        .filter(|p| p.is_file() && has_extension(p, &IMAGE_EXTENSIONS))
        .collect();
    let parsed: Vec<Option<u64>> = files
        .iter()
        .map(|p| crate::landmarks_io::frame_index_from_name(p))
        .collect();
    let usable = parsed.iter().all(Option::is_some)
        && parsed.windows(2).all(|w| w[0].unwrap() < w[1].unwrap());
    Ok(files
        .iter()
        .enumerate()
        .map(|(position, path)| FrameRef {
            path: path
                .strip_prefix(base)
                .expect("dump dir lives under the output root")
                .to_path_buf(),
            frame_index: if usable {
                parsed[position].unwrap()
            } else {
                position as u64
            },
            is_iframe: true,
        })
        .collect())
}

/// Demuxes every source into `out_dir/frames/<video_id>/` and writes the
/// manifest to `out_dir/manifest.json`. Videos that yield no I-frames are
/// kept with an empty frame list and a warning.
pub fn ingest_videos(
    sources: &[VideoSource],
    out_dir: &Path,
    demuxer_template: &str,
    max_frames: Option<usize>,
) -> Result<VideoManifest, IngestError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut manifest = VideoManifest::new(".");
    for source in sources {
        if !source.path.exists() {
            return Err(IngestError::MissingInput(source.path.clone()));
        }
        let dump_dir = out_dir.join("frames").join(&source.video_id);
        fs::create_dir_all(&dump_dir).map_err(io_err(&dump_dir))?;
        run_demuxer(demuxer_template, &source.path, &dump_dir)?;
        let mut frames = scan_dump_dir(&dump_dir, out_dir)?;
        if let Some(cap) = max_frames {
            frames.truncate(cap);
        }
        if frames.is_empty() {
            warn!("video {}: demuxer produced no I-frames", source.video_id);
        }
        info!("video {}: {} I-frames", source.video_id, frames.len());
        manifest.entries.push(VideoEntry {
            video_id: source.video_id.clone(),
            label: source.label,
            frames,
            landmark_sidecar: None,
        });
    }
    manifest.save(&out_dir.join(MANIFEST_FILE_NAME))?;
    Ok(manifest)
}

/// One pre-dumped frame directory treated as a video.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameDirSource {
    pub video_id: String,
    pub dir: PathBuf,
    pub label: Label,
}

fn subdirs_as_videos(
    class_dir: &Path,
    label: Label,
    prefix: &str,
    sources: &mut Vec<FrameDirSource>,
) -> Result<(), IngestError> {
    for path in sorted_dir(class_dir)? {
        if path.is_dir() {
            sources.push(FrameDirSource {
                video_id: format!("{prefix}{}", file_stem_id(&path)),
                dir: path,
                label,
            });
        }
    }
    Ok(())
}

/// Lists pre-dumped videos under `root`. With a label, each subdirectory
/// of `root` is one video of that class (a flat directory of images is a
/// single video); without one, `root` must hold `real/` and `fake/` trees
/// of per-video subdirectories.
pub fn collect_frame_sources(
    root: &Path,
    label: Option<Label>,
) -> Result<Vec<FrameDirSource>, IngestError> {
    if !root.is_dir() {
        return Err(IngestError::MissingInput(root.to_path_buf()));
    }
    let mut sources = Vec::new();
    match label {
        Some(label) => {
            subdirs_as_videos(root, label, "", &mut sources)?;
            let has_loose_images = sorted_dir(root)?
                .iter()
                .any(|p| p.is_file() && has_extension(p, &IMAGE_EXTENSIONS));
            if sources.is_empty() && has_loose_images {
                sources.push(FrameDirSource {
                    video_id: file_stem_id(root),
                    dir: root.to_path_buf(),
                    label,
                });
            }
        }
        None => {
            for label in [Label::Real, Label::Fake] {
                let class_dir = root.join(label.as_str());
                if class_dir.is_dir() {
                    subdirs_as_videos(&class_dir, label, &format!("{label}_"), &mut sources)?;
                }
            }
        }
    }
    if sources.is_empty() {
        return Err(IngestError::NoVideos(root.to_path_buf()));
    }
    Ok(sources)
}

/// Ingests pre-dumped frame directories under the policy that every image
/// is an I-frame, with indices 0..n in file-name order. The manifest
/// references the original files through an absolute corpus root; nothing
/// is copied or re-encoded.
pub fn ingest_frames(
    frames_root: &Path,
    label: Option<Label>,
    out_dir: &Path,
    max_frames: Option<usize>,
) -> Result<VideoManifest, IngestError> {
    if !frames_root.is_dir() {
        return Err(IngestError::MissingInput(frames_root.to_path_buf()));
    }
    let root = frames_root
        .canonicalize()
        .map_err(io_err(frames_root))?;
    let sources = collect_frame_sources(&root, label)?;
    let mut manifest = VideoManifest::new(&root);
    for source in sources {
        let mut frames: Vec<FrameRef> = sorted_dir(&source.dir)?
            .into_iter()
            .filter(|p| p.is_file() && has_extension(p, &IMAGE_EXTENSIONS))
            .enumerate()
            .map(|(position, path)| FrameRef {
                path: path
                    .strip_prefix(&root)
                    .expect("video dir lives under the corpus root")
                    .to_path_buf(),
                frame_index: position as u64,
                is_iframe: true,
            })
            .collect();
        if let Some(cap) = max_frames {
            frames.truncate(cap);
        }
        if frames.is_empty() {
            warn!("video {}: no images found, skipping", source.video_id);
            continue;
        }
        info!("video {}: {} frames", source.video_id, frames.len());
        manifest.entries.push(VideoEntry {
            video_id: source.video_id,
            label: source.label,
            frames,
            landmark_sidecar: None,
        });
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    manifest.save(&out_dir.join(MANIFEST_FILE_NAME))?;
    Ok(manifest)
}

/// Attaches `<video_id>.json` sidecars found in `landmarks_dir` to the
/// matching manifest entries and returns how many were attached. Paths are
/// stored relative to the corpus root when possible.
pub fn attach_sidecars(
    manifest: &mut VideoManifest,
    manifest_dir: &Path,
    landmarks_dir: &Path,
) -> Result<usize, IngestError> {
    if !landmarks_dir.is_dir() {
        return Err(IngestError::MissingInput(landmarks_dir.to_path_buf()));
    }
    let root = manifest.resolve(manifest_dir, Path::new(""));
    let mut attached = 0;
    for entry in &mut manifest.entries {
        let candidate = landmarks_dir.join(format!("{}.json", entry.video_id));
        if !candidate.is_file() {
            continue;
        }
        let canonical = candidate.canonicalize().map_err(io_err(&candidate))?;
        let stored = match root.canonicalize() {
            Ok(canonical_root) => canonical
                .strip_prefix(&canonical_root)
                .map(Path::to_path_buf)
                .unwrap_or(canonical),
            Err(_) => canonical,
        };
        entry.landmark_sidecar = Some(stored);
        attached += 1;
    }
    Ok(attached)
}
