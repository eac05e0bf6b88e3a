//! Parallel dataset augmentation.
//!
//! Work is split per source image; variant `v` of source image `i` always
//! uses RNG stream `i * multiplier + v`, so the output tree depends only on
//! the inputs, config, seed and multiplier, never on the worker count.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use bgm_core::{background_mixup, derive_image_rng, AugConfig, BBox, Mode};
use bgm_dataset::{
    load_dataset, load_image, save_dataset, save_image, Dataset, DatasetError, LoadReport, ManifestHeader,
    ManifestRecord, ManifestWriter,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub const IMAGES_DIR: &str = "images";
pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone)]
pub struct AugmentJob {
    pub images: PathBuf,
    pub annotations: PathBuf,
    pub out: PathBuf,
    pub config: AugConfig,
    pub seed: u64,
    pub workers: usize,
    pub multiplier: u32,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ModeCounts {
    pub none: usize,
    pub spm: usize,
    pub cpm: usize,
    pub both: usize,
}

impl ModeCounts {
    fn add(&mut self, mode: Mode) {
        match mode {
            Mode::None => self.none += 1,
            Mode::Spm => self.spm += 1,
            Mode::Cpm => self.cpm += 1,
            Mode::Both => self.both += 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FailedImage {
    pub file_name: String,
    pub error: String,
}

/// Machine-readable outcome of a batch run.
#[derive(Debug, Clone, Serialize)]
pub struct AugmentSummary {
    pub source_images: usize,
    pub emitted: usize,
    pub failed: Vec<FailedImage>,
    pub boxes_clamped: usize,
    pub boxes_dropped: usize,
    pub modes: ModeCounts,
    pub annotation_files: Vec<String>,
}

/// Output name for variant `variant` of `file_name`: same directory,
/// `<stem>_bgm<variant>.png`.
pub fn output_name(file_name: &str, variant: u32) -> String {
    let path = Path::new(file_name);
    let stem = path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    let name = format!("{stem}_bgm{variant}.png");
    match path.parent().filter(|p| !p.as_os_str().is_empty()) {
        Some(parent) => parent.join(name).to_string_lossy().replace('\\', "/"),
        None => name,
    }
}

/// Output base names, disambiguated by image id where two sources share a
/// stem (`a.jpg` and `a.png`).
fn output_bases(ds: &Dataset) -> Vec<String> {
    let plain: Vec<String> = ds.images.iter().map(|im| output_name(&im.file_name, 0)).collect();
    let mut seen = HashSet::new();
    let dupes: HashSet<&String> = plain.iter().filter(|n| !seen.insert(*n)).collect();
    ds.images
        .iter()
        .zip(&plain)
        .map(|(im, p)| {
            if dupes.contains(p) {
                let path = Path::new(&im.file_name);
                let stem = path.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
                let renamed = format!("{stem}_id{}.png", im.id);
                match path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    Some(parent) => parent.join(renamed).to_string_lossy().replace('\\', "/"),
                    None => renamed,
                }
            } else {
                im.file_name.clone()
            }
        })
        .collect()
}

pub fn annotation_file_name(variant: u32) -> String {
    format!("annotations_bgm{variant}.json")
}

struct ImageOutcome {
    records: Vec<ManifestRecord>,
    failure: Option<FailedImage>,
}

fn augment_one(
    job: &AugmentJob,
    index: usize,
    entry: &bgm_dataset::ImageEntry,
    base: &str,
    boxes: &[BBox],
    out_images: &Path,
) -> Result<ImageOutcome, BatchError> {
    let src_path = job.images.join(&entry.file_name);
    let img = match load_image(&src_path) {
        Ok(img) => img,
        Err(e) => {
            log::warn!("skipping {}: {e}", entry.file_name);
            return Ok(ImageOutcome {
                records: Vec::new(),
                failure: Some(FailedImage { file_name: entry.file_name.clone(), error: e.to_string() }),
            });
        }
    };
    if img.dims() != (entry.width, entry.height) {
        log::warn!(
            "{}: annotated as {}x{}, decoded as {}x{}",
            entry.file_name,
            entry.width,
            entry.height,
            img.width(),
            img.height()
        );
    }
    let mut records = Vec::with_capacity(job.multiplier as usize);
    for variant in 0..job.multiplier {
        let stream = index as u64 * job.multiplier as u64 + variant as u64;
        let mut rng = derive_image_rng(job.seed, stream);
        let result = background_mixup(&img, boxes, &job.config, &mut rng)
            .expect("config validated before the batch starts");
        let out_name = output_name(base, variant);
        let out_path = out_images.join(&out_name);
        if let Some(parent) = out_path.parent() {
            fs::create_dir_all(parent).map_err(|e| BatchError::Io { path: parent.to_path_buf(), source: e })?;
        }
        save_image(&result.image, &out_path)?;
        records.push(ManifestRecord {
            source_file: entry.file_name.clone(),
            output_file: format!("{IMAGES_DIR}/{out_name}"),
            source_image_id: entry.id,
            seed: job.seed,
            image_index: stream,
            variant,
            log: result.log,
        });
    }
    Ok(ImageOutcome { records, failure: None })
}

/// Load a dataset and run the whole batch. The config must already be
/// validated.
pub fn run_augment(job: &AugmentJob) -> Result<AugmentSummary, BatchError> {
    let (ds, report) = load_dataset(&job.annotations, &job.images)?;
    run_augment_loaded(job, &ds, report)
}

pub fn run_augment_loaded(job: &AugmentJob, ds: &Dataset, report: LoadReport) -> Result<AugmentSummary, BatchError> {
    let out_images = job.out.join(IMAGES_DIR);
    fs::create_dir_all(&out_images).map_err(|e| BatchError::Io { path: out_images.clone(), source: e })?;

    let boxes = ds.boxes_by_image();
    let bases = output_bases(ds);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.workers.max(1))
        .build()
        .map_err(|e| BatchError::Pool(e.to_string()))?;

    let outcomes: Vec<Result<ImageOutcome, BatchError>> = pool.install(|| {
        ds.images
            .par_iter()
            .enumerate()
            .map(|(i, entry)| augment_one(job, i, entry, &bases[i], &boxes[i], &out_images))
            .collect()
    });

    let header = ManifestHeader::new(job.seed, job.multiplier, job.config.clone());
    let manifest_path = job.out.join(MANIFEST_FILE);
    let mut manifest = ManifestWriter::create(&manifest_path, &header)?;
    let io_err = |e| BatchError::Io { path: manifest_path.clone(), source: e };

    let mut failed = Vec::new();
    let mut failed_ids = HashSet::new();
    let mut modes = ModeCounts::default();
    let mut emitted = 0;
    for (outcome, entry) in outcomes.into_iter().zip(&ds.images) {
        let outcome = outcome?;
        if let Some(f) = outcome.failure {
            failed_ids.insert(entry.id);
            failed.push(f);
        }
        for record in &outcome.records {
            modes.add(record.log.mode);
            manifest.append(record).map_err(io_err)?;
            emitted += 1;
        }
    }
    manifest.finish().map_err(io_err)?;

    // One annotation file per variant: the input annotations with each
    // file_name pointing at that variant's output image.
    let base_by_id: std::collections::HashMap<u64, &String> =
        ds.images.iter().zip(&bases).map(|(im, b)| (im.id, b)).collect();
    let mut annotation_files = Vec::new();
    for variant in 0..job.multiplier {
        let mut out = ds.clone();
        out.images.retain(|im| !failed_ids.contains(&im.id));
        out.annotations.retain(|a| !failed_ids.contains(&a.image_id));
        for im in &mut out.images {
            im.file_name = output_name(base_by_id[&im.id], variant);
        }
        let name = annotation_file_name(variant);
        save_dataset(&out, &job.out.join(&name))?;
        annotation_files.push(name);
    }

    Ok(AugmentSummary {
        source_images: ds.images.len(),
        emitted,
        failed,
        boxes_clamped: report.clamped,
        boxes_dropped: report.dropped,
        modes,
        annotation_files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_names() {
        assert_eq!(output_name("a.jpg", 0), "a_bgm0.png");
        assert_eq!(output_name("sub/dir/scan.001.png", 3), "sub/dir/scan.001_bgm3.png");
        assert_eq!(output_name("noext", 1), "noext_bgm1.png");
    }
}
