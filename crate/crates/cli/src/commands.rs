//! Argument definitions and subcommand bodies. Each `cmd_*` returns a
//! process exit code; diagnostics go to stderr, machine output to stdout.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bgm_core::reference::{OracleOptions, Rounding};
use bgm_core::verify::{random_trial, run_trial};
use bgm_core::{background_mixup, derive_image_rng, validate_config, AugConfig, BBox, ConfigError};
use bgm_dataset::{load_dataset, load_image, read_annotations, save_image, DatasetError};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::batch::{run_augment_loaded, AugmentJob};
use crate::exit;

#[derive(Debug, Parser)]
#[command(name = "bgm", version, about = "Background Mixup augmentation for X-ray detection datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Augment every image of a COCO-style dataset.
    Augment(AugmentArgs),
    /// Write a few augmented variants of a single image.
    Preview(PreviewArgs),
    /// Check the optimized pipeline against the reference implementation.
    Verify(VerifyArgs),
}

/// Config sources, applied in order: defaults, `--config` file, `--set`
/// overrides, dedicated flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config key, e.g. `--set spm_alpha=[0.2,0.4]`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Shorthand for `--set apply_probability=P`.
    #[arg(long, value_name = "P")]
    pub apply_probability: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AugmentArgs {
    /// Directory the annotation file names are relative to.
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// COCO-style annotation file.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Augmented variants per source image.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub multiplier: u32,
    /// Exit non-zero if any image fails to decode.
    #[arg(long)]
    pub strict: bool,
    /// Print a JSON summary to stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PreviewArgs {
    #[arg(long)]
    pub image: PathBuf,
    /// Optional annotation file; boxes of the entry with the same file name
    /// are protected from SPM sampling.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub count: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = 96, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_dim: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run the reference with truncating rounding, which must diverge.
    #[arg(long, hide = true)]
    pub perturb_rounding: bool,
}

/// Assemble and validate a config from its sources.
pub fn load_config(args: &ConfigArgs) -> Result<AugConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
            AugConfig::from_toml_str(&text)?
        }
        None => AugConfig::default(),
    };
    for kv in &args.overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::Parse(format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(key.trim(), value.trim())?;
    }
    if let Some(p) = args.apply_probability {
        cfg.apply_probability = p;
    }
    validate_config(&cfg)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn cmd_augment(args: &AugmentArgs) -> i32 {
    let config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid config: {e}");
            return exit::CONFIG;
        }
    };
    let Some(annotations) = args.annotations.clone() else {
        eprintln!("error: --annotations is required to load a dataset");
        return exit::DATASET;
    };
    let images = args
        .images
        .clone()
        .unwrap_or_else(|| annotations.parent().map(Path::to_path_buf).unwrap_or_default());
    let job = AugmentJob {
        images,
        annotations,
        out: args.out.clone(),
        config,
        seed: args.seed,
        workers: args.workers.unwrap_or_else(default_workers),
        multiplier: args.multiplier,
    };

    let (ds, report) = match load_dataset(&job.annotations, &job.images) {
        Ok(loaded) => loaded,
        Err(e) => {
            eprintln!("error: cannot load dataset: {e}");
            return exit::DATASET;
        }
    };
    let start = Instant::now();
    let summary = match run_augment_loaded(&job, &ds, report) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::FAILURE;
        }
    };
    let secs = start.elapsed().as_secs_f64();
    if summary.boxes_clamped + summary.boxes_dropped > 0 {
        eprintln!(
            "warning: {} boxes clamped and {} dropped at the image border",
            summary.boxes_clamped, summary.boxes_dropped
        );
    }
    for f in &summary.failed {
        eprintln!("skipped {}: {}", f.file_name, f.error);
    }
    eprintln!(
        "augmented {} source images into {} outputs ({} skipped) in {:.2}s with {} workers",
        summary.source_images - summary.failed.len(),
        summary.emitted,
        summary.failed.len(),
        secs,
        job.workers,
    );
    if args.json {
        let mut value = serde_json::to_value(&summary).expect("summary serializes");
        value["seconds"] = json!(secs);
        value["workers"] = json!(job.workers);
        println!("{value}");
    }
    if args.strict && !summary.failed.is_empty() {
        return exit::STRICT;
    }
    exit::OK
}

fn preview_boxes(ann: &Path, image: &Path) -> Result<Vec<BBox>, DatasetError> {
    let (ds, _) = read_annotations(ann)?;
    let wanted = image.file_name();
    let boxes = ds.boxes_by_image();
    let found = ds
        .images
        .iter()
        .position(|im| Path::new(&im.file_name).file_name() == wanted);
    match found {
        Some(i) => Ok(boxes[i].clone()),
        None => {
            log::warn!("{} has no entry in {}; no boxes protected", image.display(), ann.display());
            Ok(Vec::new())
        }
    }
}

pub fn cmd_preview(args: &PreviewArgs) -> i32 {
    let config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid config: {e}");
            return exit::CONFIG;
        }
    };
    let img = match load_image(&args.image) {
        Ok(img) => img,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::DATASET;
        }
    };
    let boxes = match &args.annotations {
        Some(ann) => match preview_boxes(ann, &args.image) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("error: cannot load annotations: {e}");
                return exit::DATASET;
            }
        },
        None => Vec::new(),
    };
    if let Err(e) = fs::create_dir_all(&args.out) {
        eprintln!("error: {}: {e}", args.out.display());
        return exit::FAILURE;
    }
    if let Err(e) = save_image(&img, &args.out.join("original.png")) {
        eprintln!("error: {e}");
        return exit::FAILURE;
    }
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    for variant in 0..args.count {
        let mut rng = derive_image_rng(args.seed, variant as u64);
        let result = background_mixup(&img, &boxes, &config, &mut rng).expect("config already validated");
        let name = format!("variant_{variant}.png");
        if let Err(e) = save_image(&result.image, &args.out.join(&name)) {
            eprintln!("error: {e}");
            return exit::FAILURE;
        }
        let mut line = serde_json::to_value(&result.log).expect("log serializes");
        line["variant"] = json!(variant);
        line["output_file"] = json!(name);
        let _ = writeln!(stdout, "{line}");
    }
    exit::OK
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    if args.trials == 0 {
        eprintln!("warning: no trials requested");
        return exit::OK;
    }
    let opts = OracleOptions {
        rounding: if args.perturb_rounding { Rounding::Truncate } else { Rounding::HalfAwayFromZero },
    };
    for i in 0..args.trials {
        let trial = random_trial(args.seed, i, args.max_dim);
        if let Some(div) = run_trial(&trial, opts) {
            println!(
                "trial {i} diverged (image {}x{}, {} boxes, seed {}): {div}",
                trial.image.width(),
                trial.image.height(),
                trial.gt.len(),
                trial.seed
            );
            return exit::FAILURE;
        }
    }
    println!("{} trials bit-equal", args.trials);
    exit::OK
}
