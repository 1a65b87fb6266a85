//! The batch command-line frontend.
//!
//! Every stage reads and writes on-disk artifacts only; stdout carries the
//! human summary, the log crate carries diagnostics on stderr. Exit code 0
//! means the command's postcondition held, 2 flags usage errors such as
//! missing input paths, and 1 flags runtime failures.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use betadct_core::{
    evaluate_grid, stratified_split, select_model, ClassifierGridEntry, Dataset, DatasetRow,
    EvalGrid, Label, SplitAssignment,
};
use clap::{Args, Parser, Subcommand};
use log::warn;

use crate::config::{self, GridLayout, RunConfig};
use crate::features::{self, FeatureOptions};
use crate::ingest::{self, IngestError, DEFAULT_DEMUXER};
use crate::landmarks_io;
use crate::manifest::{VideoManifest, MANIFEST_FILE_NAME};
use crate::model_io::{save_model, ModelFile};
use crate::report::{self, ReportFormat};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn require_dir(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(usage(format!("{what} directory {} does not exist", path.display())))
    }
}

fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{what} file {} does not exist", path.display())))
    }
}

fn label_value(s: &str) -> Result<Label, String> {
    Label::parse(s).ok_or_else(|| format!("expected \"real\" or \"fake\", got {s:?}"))
}

#[derive(Debug, Parser)]
#[command(
    name = "betadct",
    version,
    about = "Deepfake screening from the Laplacian statistics of block-DCT coefficients"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for feature extraction and grid evaluation
    /// (default: all cores). Output is identical for any value.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Log filter written to stderr (error, warn, info, debug, trace).
    /// Defaults to a run-all config's "log_level", then to info.
    #[arg(long, global = true)]
    pub log_level: Option<String>,
}

impl Cli {
    /// Resolves the log filter before the logger is installed: the flag
    /// wins, then a run-all config's "log_level". Config errors are
    /// ignored here; the command itself reports them.
    pub fn effective_log_level(&self) -> String {
        if let Some(level) = &self.log_level {
            return level.clone();
        }
        if let Command::RunAll(args) = &self.command {
            if let Ok(config) = RunConfig::load(&args.config) {
                if let Some(level) = config.log_level {
                    return level;
                }
            }
        }
        String::from("info")
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a labeled I-frame manifest from videos or frame directories.
    Ingest(IngestArgs),
    /// Convert per-frame landmark text files into JSON sidecars.
    LandmarksImport(LandmarksImportArgs),
    /// Extract per-region beta feature tables from an ingested corpus.
    Features(FeaturesArgs),
    /// Produce the stratified 50/20/30 train/validation/test split.
    Split(SplitArgs),
    /// Train one classifier on one region's feature table.
    Train(TrainArgs),
    /// Evaluate the classifier grid and emit reports plus the heatmap.
    Evaluate(EvaluateArgs),
    /// Ingest, extract features, and evaluate from one config file.
    RunAll(RunAllArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory of video files (real/ and fake/ subdirectories, or flat
    /// with --label).
    #[arg(long, conflicts_with = "frames")]
    pub videos: Option<PathBuf>,
    /// Directory of pre-dumped frames (one subdirectory per video).
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Output directory for frame dumps and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Treat every input as this class instead of using subdirectories.
    #[arg(long, value_parser = label_value)]
    pub label: Option<Label>,
    /// iframes (demux videos) or all (every image is an I-frame).
    #[arg(long)]
    pub policy: Option<String>,
    /// Demuxer command template with {input} and {outdir} placeholders.
    #[arg(long, default_value = DEFAULT_DEMUXER)]
    pub demuxer: String,
    /// Directory of <video_id>.json landmark sidecars to attach.
    #[arg(long)]
    pub landmarks: Option<PathBuf>,
    /// Keep at most this many frames per video.
    #[arg(long)]
    pub max_frames: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LandmarksImportArgs {
    /// Directory of landmark text files (one <video_id>/ subdirectory per
    /// video in manifest mode, or one file per frame with --out).
    #[arg(long)]
    pub text_dir: PathBuf,
    /// Manifest to update: sidecars are written next to it and attached.
    #[arg(long, conflicts_with = "out")]
    pub manifest: Option<PathBuf>,
    /// Write one sidecar JSON here instead of updating a manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Manifest produced by ingest.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory; tables land in <out>/features/<region>.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated regions (default: all seven).
    #[arg(long, value_delimiter = ',')]
    pub regions: Vec<String>,
    /// Minimum 8x8 blocks under a mask for a patch to count.
    #[arg(long, default_value_t = betadct_core::beta::DEFAULT_MIN_BLOCKS_PER_PATCH)]
    pub min_blocks: usize,
    /// Pool all of a video's blocks into one estimate per region.
    #[arg(long)]
    pub pooled: bool,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Any region's feature table; the split uses ids and labels only.
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Where to write the split JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Feature table of the region to train on.
    #[arg(long)]
    pub features: PathBuf,
    /// Split JSON produced by the split command.
    #[arg(long)]
    pub split: PathBuf,
    /// knn, knn_<k>, lda, decision_tree, or random_forest; the bare knn
    /// family picks k on the validation split.
    #[arg(long)]
    pub classifier: String,
    #[arg(long)]
    pub seed: u64,
    /// Where to write the model JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory holding <region>.csv feature tables.
    #[arg(long)]
    pub features_dir: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Output directory for report.* files and heatmap.svg.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated classifier names (default: the full bench).
    #[arg(long, value_delimiter = ',')]
    pub classifiers: Vec<String>,
    /// per-setting (one row per hyperparameter value) or family.
    #[arg(long, default_value = "per-setting")]
    pub grid_layout: String,
    /// Comma-separated report formats among csv, json, markdown.
    #[arg(long, value_delimiter = ',')]
    pub formats: Vec<String>,
    /// Corpus label recorded in the grid for sub-grid reports.
    #[arg(long)]
    pub corpus_tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunAllArgs {
    /// Run configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_jobs(cli.jobs);
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::LandmarksImport(args) => cmd_landmarks_import(args),
        Command::Features(args) => cmd_features(args),
        Command::Split(args) => cmd_split(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::RunAll(args) => cmd_run_all(args, cli.jobs),
    }
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let result = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
        if result.is_err() {
            warn!("worker pool already initialized; --jobs ignored");
        }
    }
}

fn map_ingest(err: IngestError) -> CliError {
    match err {
        IngestError::MissingInput(path) => {
            usage(format!("input path {} does not exist", path.display()))
        }
        other => CliError::Runtime(other.into()),
    }
}

fn print_frame_counts(manifest: &VideoManifest) {
    for entry in &manifest.entries {
        println!("{}\t{}\t{} I-frames", entry.video_id, entry.label, entry.frames.len());
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<(), CliError> {
    let policy = args.policy.as_deref();
    let mut manifest = match (&args.videos, &args.frames) {
        (Some(videos), None) => {
            if !matches!(policy, None | Some("iframes")) {
                return Err(usage("--videos requires --policy iframes"));
            }
            require_dir(videos, "input")?;
            let sources = ingest::collect_video_sources(videos, args.label).map_err(map_ingest)?;
            ingest::ingest_videos(&sources, &args.out, &args.demuxer, args.max_frames)
                .map_err(map_ingest)?
        }
        (None, Some(frames)) => {
            if !matches!(policy, None | Some("all")) {
                return Err(usage("--frames requires --policy all"));
            }
            require_dir(frames, "input")?;
            ingest::ingest_frames(frames, args.label, &args.out, args.max_frames)
                .map_err(map_ingest)?
        }
        _ => return Err(usage("pass exactly one of --videos or --frames")),
    };
    if let Some(landmarks) = &args.landmarks {
        require_dir(landmarks, "landmarks")?;
        let attached = ingest::attach_sidecars(&mut manifest, &args.out, landmarks)
            .map_err(map_ingest)?;
        manifest
            .save(&args.out.join(MANIFEST_FILE_NAME))
            .context("saving manifest")?;
        println!("attached {attached} landmark sidecars");
    }
    print_frame_counts(&manifest);
    println!("manifest: {}", args.out.join(MANIFEST_FILE_NAME).display());
    Ok(())
}

fn cmd_landmarks_import(args: LandmarksImportArgs) -> Result<(), CliError> {
    require_dir(&args.text_dir, "landmark text")?;
    match (&args.manifest, &args.out) {
        (None, Some(out)) => {
            let map = landmarks_io::import_text_dir(&args.text_dir)
                .context("importing landmark text files")?;
            landmarks_io::save_landmarks(out, &map).context("writing sidecar")?;
            println!("{}: {} annotated frames", out.display(), map.len());
            Ok(())
        }
        (Some(manifest_path), None) => {
            require_file(manifest_path, "manifest")?;
            let mut manifest =
                VideoManifest::load(manifest_path).context("loading manifest")?;
            let manifest_dir = manifest_path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            let sidecar_dir = manifest_dir.join("landmarks");
            fs::create_dir_all(&sidecar_dir)
                .with_context(|| format!("creating {}", sidecar_dir.display()))?;
            let mut converted = 0;
            for entry in &manifest.entries {
                let video_dir = args.text_dir.join(&entry.video_id);
                if !video_dir.is_dir() {
                    continue;
                }
                let map = landmarks_io::import_text_dir(&video_dir)
                    .with_context(|| format!("importing {}", video_dir.display()))?;
                let sidecar = sidecar_dir.join(format!("{}.json", entry.video_id));
                landmarks_io::save_landmarks(&sidecar, &map).context("writing sidecar")?;
                converted += 1;
            }
            let attached = ingest::attach_sidecars(&mut manifest, &manifest_dir, &sidecar_dir)
                .map_err(map_ingest)?;
            manifest.save(manifest_path).context("saving manifest")?;
            println!("converted {converted} videos, attached {attached} sidecars");
            Ok(())
        }
        _ => Err(usage("pass exactly one of --manifest or --out")),
    }
}

fn feature_options(regions: &[String], min_blocks: usize, pooled: bool) -> Result<FeatureOptions, CliError> {
    let mut options = FeatureOptions {
        min_blocks,
        pooled,
        ..FeatureOptions::default()
    };
    if !regions.is_empty() {
        options.regions =
            config::parse_regions(regions).map_err(|e| usage(e.to_string()))?;
    }
    Ok(options)
}

fn cmd_features(args: FeaturesArgs) -> Result<(), CliError> {
    require_file(&args.manifest, "manifest")?;
    let manifest = VideoManifest::load(&args.manifest).context("loading manifest")?;
    let manifest_dir = args
        .manifest
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let options = feature_options(&args.regions, args.min_blocks, args.pooled)?;
    let tables = features::extract_descriptors(&manifest, &manifest_dir, &options)
        .context("extracting features")?;
    let paths = features::write_feature_tables(&args.out, &tables)
        .context("writing feature tables")?;
    for ((region, descriptors), path) in tables.iter().zip(&paths) {
        println!(
            "{}\t{} videos\t{}",
            region.as_str(),
            descriptors.len(),
            path.display()
        );
    }
    Ok(())
}

fn load_split(path: &Path) -> Result<SplitAssignment, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading split file {}", path.display()))?;
    let split: SplitAssignment = serde_json::from_str(&text)
        .with_context(|| format!("parsing split file {}", path.display()))?;
    Ok(split)
}

fn save_split(path: &Path, split: &SplitAssignment) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(split).context("serializing split")?;
    bytes.push(b'\n');
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_split(args: SplitArgs) -> Result<(), CliError> {
    require_file(&args.features, "features")?;
    let dataset = features::read_feature_csv(&args.features).context("reading features")?;
    let split = stratified_split(&dataset, args.seed).context("splitting")?;
    save_split(&args.out, &split)?;
    let (train, val, test) = split.sizes();
    println!("train {train} / val {val} / test {test} -> {}", args.out.display());
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    require_file(&args.features, "features")?;
    require_file(&args.split, "split")?;
    let dataset = features::read_feature_csv(&args.features).context("reading features")?;
    let split = load_split(&args.split)?;
    let settings = config::classifier_settings(&args.classifier)
        .ok_or_else(|| usage(format!("unknown classifier {:?}", args.classifier)))?;
    let train_rows = dataset.subset(&split.train_ids);
    let val_rows = dataset.subset(&split.val_ids);
    let selection = select_model(&settings, train_rows.rows(), val_rows.rows(), args.seed)
        .context("training")?;
    let chosen = selection.model.spec().name();
    let file = ModelFile::new(args.seed, dataset.region(), selection.model);
    save_model(&args.out, &file).context("writing model")?;
    match selection.validation_auc {
        Some(auc) => println!(
            "trained {chosen} on {} (validation AUC {:.2}%) -> {}",
            dataset.region().as_str(),
            auc * 100.0,
            args.out.display()
        ),
        None => println!(
            "trained {chosen} on {} -> {}",
            dataset.region().as_str(),
            args.out.display()
        ),
    }
    Ok(())
}

/// Builds the split over the union of video ids across all regions, so
/// every region's cells subset one shared assignment.
fn union_split(datasets: &[Dataset], seed: u64) -> Result<SplitAssignment, CliError> {
    let mut by_id: BTreeMap<&str, Label> = BTreeMap::new();
    for dataset in datasets {
        for row in dataset.rows() {
            let previous = by_id.insert(&row.video_id, row.label);
            if previous.is_some_and(|p| p != row.label) {
                return Err(CliError::Runtime(anyhow::anyhow!(
                    "video {} carries conflicting labels across regions",
                    row.video_id
                )));
            }
        }
    }
    let rows: Vec<DatasetRow> = by_id
        .into_iter()
        .map(|(video_id, label)| DatasetRow {
            video_id: video_id.to_string(),
            label,
            features: vec![0.0],
        })
        .collect();
    let ids = Dataset::new(betadct_core::RegionKind::EntireFrame, rows)
        .context("collecting video ids")?;
    Ok(stratified_split(&ids, seed).context("splitting")?)
}

/// Evaluates the grid entries in parallel (one task per row) and stitches
/// the cells back in row order, which reproduces the sequential result.
fn evaluate_rows(
    datasets: &[Dataset],
    grid: &[ClassifierGridEntry],
    split: &SplitAssignment,
) -> Result<EvalGrid, CliError> {
    use rayon::prelude::*;
    if grid.is_empty() {
        return Ok(evaluate_grid(datasets, grid, split).context("evaluating")?);
    }
    let per_row: Vec<Result<EvalGrid, betadct_core::eval::GridError>> = grid
        .par_iter()
        .map(|entry| evaluate_grid(datasets, std::slice::from_ref(entry), split))
        .collect();
    let mut combined: Option<EvalGrid> = None;
    for row in per_row {
        let row = row.context("evaluating")?;
        match &mut combined {
            None => combined = Some(row),
            Some(grid) => grid.cells.extend(row.cells),
        }
    }
    Ok(combined.expect("at least one grid row"))
}

struct EvaluateSpec<'a> {
    datasets: &'a [Dataset],
    classifiers: &'a [String],
    layout: GridLayout,
    formats: &'a [ReportFormat],
    seed: u64,
    corpus_tag: Option<String>,
    out_dir: &'a Path,
}

fn evaluate_and_report(spec: EvaluateSpec<'_>) -> Result<EvalGrid, CliError> {
    let grid_rows = config::build_grid(spec.classifiers, spec.layout)
        .map_err(|e| usage(e.to_string()))?;
    let split = union_split(spec.datasets, spec.seed)?;
    let mut grid = evaluate_rows(spec.datasets, &grid_rows, &split)?;
    grid.corpus_tag = spec.corpus_tag;

    fs::create_dir_all(spec.out_dir)
        .with_context(|| format!("creating {}", spec.out_dir.display()))?;
    save_split(&spec.out_dir.join("split.json"), &split)?;
    for format in spec.formats {
        let path = spec.out_dir.join(format!("report.{}", format.extension()));
        report::emit_report(&grid, *format, &path)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("report: {}", path.display());
    }
    let heatmap = spec.out_dir.join("heatmap.svg");
    report::emit_heatmap(&grid, &heatmap)
        .with_context(|| format!("writing {}", heatmap.display()))?;
    println!("heatmap: {}", heatmap.display());
    if let Some(line) = report::best_cell_line(&grid) {
        println!("{line}");
    }
    Ok(grid)
}

fn parse_formats(names: &[String]) -> Result<Vec<ReportFormat>, CliError> {
    if names.is_empty() {
        return Ok(ReportFormat::ALL.to_vec());
    }
    names
        .iter()
        .map(|name| {
            ReportFormat::parse(name).ok_or_else(|| usage(format!("unknown format {name:?}")))
        })
        .collect()
}

fn default_classifier_names() -> Vec<String> {
    ["knn", "lda", "decision_tree", "random_forest"]
        .map(String::from)
        .to_vec()
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    require_dir(&args.features_dir, "features")?;
    let datasets = features::read_feature_tables(&args.features_dir)
        .context("reading feature tables")?;
    let classifiers = if args.classifiers.is_empty() {
        default_classifier_names()
    } else {
        args.classifiers.clone()
    };
    let layout = GridLayout::parse(&args.grid_layout)
        .ok_or_else(|| usage(format!("unknown grid layout {:?}", args.grid_layout)))?;
    let formats = parse_formats(&args.formats)?;
    evaluate_and_report(EvaluateSpec {
        datasets: &datasets,
        classifiers: &classifiers,
        layout,
        formats: &formats,
        seed: args.seed,
        corpus_tag: args.corpus_tag,
        out_dir: &args.out,
    })?;
    Ok(())
}

fn cmd_run_all(args: RunAllArgs, cli_jobs: Option<usize>) -> Result<(), CliError> {
    require_file(&args.config, "config")?;
    let config = RunConfig::load(&args.config).map_err(|e| usage(e.to_string()))?;
    if cli_jobs.is_none() {
        configure_jobs(config.jobs);
    }
    fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating {}", config.out_dir.display()))?;

    // Stage 1: ingest.
    let mut manifest = match (&config.videos, &config.frames) {
        (Some(videos), None) => {
            require_dir(videos, "input")?;
            let sources =
                ingest::collect_video_sources(videos, config.label).map_err(map_ingest)?;
            ingest::ingest_videos(&sources, &config.out_dir, &config.demuxer, config.max_frames)
                .map_err(map_ingest)?
        }
        (None, Some(frames)) => {
            require_dir(frames, "input")?;
            ingest::ingest_frames(frames, config.label, &config.out_dir, config.max_frames)
                .map_err(map_ingest)?
        }
        _ => return Err(usage("config needs exactly one of \"videos\" or \"frames\"")),
    };
    if let Some(landmarks) = &config.landmarks {
        require_dir(landmarks, "landmarks")?;
        let attached = ingest::attach_sidecars(&mut manifest, &config.out_dir, landmarks)
            .map_err(map_ingest)?;
        manifest
            .save(&config.out_dir.join(MANIFEST_FILE_NAME))
            .context("saving manifest")?;
        println!("attached {attached} landmark sidecars");
    }
    println!("ingested {} videos", manifest.entries.len());

    // Stage 2: features.
    let options = feature_options(&config.regions, config.min_blocks_per_patch, config.pooled)?;
    let tables = features::extract_descriptors(&manifest, &config.out_dir, &options)
        .context("extracting features")?;
    features::write_feature_tables(&config.out_dir, &tables).context("writing feature tables")?;
    let datasets: Vec<Dataset> =
        features::read_feature_tables(&config.out_dir.join(features::FEATURES_DIR_NAME))
            .context("reading feature tables back")?;

    // Stage 3: split, grid evaluation, reports.
    evaluate_and_report(EvaluateSpec {
        datasets: &datasets,
        classifiers: &config.classifiers,
        layout: config.grid_layout,
        formats: &ReportFormat::ALL,
        seed: config.seed,
        corpus_tag: config.corpus_tag.clone(),
        out_dir: &config.out_dir,
    })?;
    Ok(())
}
