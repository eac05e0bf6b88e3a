//! Randomized equivalence trials between the optimized pipeline and the
//! naive reference.

use std::fmt;

use crate::config::{AugConfig, ClosedRange};
use crate::geometry::BBox;
use crate::image::RgbImage;
use crate::pipeline::{background_mixup, AugResult};
use crate::reference::{naive_background_mixup_with, OracleOptions};
use crate::rng::{RandomSource, SeededRng};

/// One randomized input: image, boxes, config and augmentation seed.
#[derive(Debug, Clone)]
pub struct Trial {
    pub index: u64,
    pub image: RgbImage,
    pub gt: Vec<BBox>,
    pub cfg: AugConfig,
    pub seed: u64,
}

fn sub_range<R: RandomSource>(rng: &mut R, lo: f64, hi: f64) -> ClosedRange<f64> {
    let a = rng.real_in(lo, hi);
    let b = rng.real_in(lo, hi);
    // Occasionally pin the range to a single value.
    if rng.int_in(0, 9) == 0 {
        ClosedRange::new(a, a)
    } else {
        ClosedRange::new(a.min(b), a.max(b))
    }
}

fn count_range<R: RandomSource>(rng: &mut R) -> ClosedRange<u32> {
    let a = rng.int_in(0, 5) as u32;
    let b = rng.int_in(0, 5) as u32;
    ClosedRange::new(a.min(b), a.max(b))
}

/// A random valid config. Half of them always apply augmentation.
pub fn random_config<R: RandomSource>(rng: &mut R) -> AugConfig {
    let apply_probability = if rng.int_in(0, 1) == 0 { 1.0 } else { rng.next_f64() };
    let raw = [rng.next_f64(), rng.next_f64(), rng.next_f64()];
    let total: f64 = raw.iter().sum();
    let mode_weights = if total > 0.0 {
        [raw[0] / total, raw[1] / total, 1.0 - raw[0] / total - raw[1] / total]
    } else {
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]
    };
    AugConfig {
        apply_probability,
        spm_patch_count: count_range(rng),
        cpm_patch_count: count_range(rng),
        spm_alpha: sub_range(rng, 0.0, 1.0),
        cpm_alpha: sub_range(rng, 0.0, 1.0),
        spm_area_ratio: sub_range(rng, 0.01, 1.0),
        cpm_area_ratio: sub_range(rng, 0.01, 1.0),
        white_threshold: rng.int_in(150, 255) as u32,
        min_background_fraction: rng.next_f64() * 0.9,
        max_sample_attempts: rng.int_in(1, 60) as u32,
        mode_weights: mode_weights.map(|w| w.max(0.0)),
    }
}

/// A scan-like image: near-white belt with a few dark rectangles.
pub fn random_image<R: RandomSource>(rng: &mut R, width: u32, height: u32) -> RgbImage {
    let mut img = RgbImage::from_fn(width, height, |_, _| {
        let v = rng.int_in(235, 255) as u8;
        [v, v, v]
    })
    .expect("dims are positive");
    let blobs = rng.int_in(0, 6);
    for _ in 0..blobs {
        let w = rng.int_in(1, width as i64) as u32;
        let h = rng.int_in(1, height as i64) as u32;
        let x0 = rng.int_in(0, (width - w) as i64) as u32;
        let y0 = rng.int_in(0, (height - h) as i64) as u32;
        let base = [
            rng.int_in(0, 255) as u8,
            rng.int_in(0, 200) as u8,
            rng.int_in(0, 255) as u8,
        ];
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                let n = rng.int_in(0, 30) as u8;
                img.set_pixel(x, y, base.map(|c| c.saturating_add(n)));
            }
        }
    }
    img
}

/// Between 0 and `max_boxes` boxes inside the image, some fractional.
pub fn random_boxes<R: RandomSource>(rng: &mut R, width: u32, height: u32, max_boxes: u32) -> Vec<BBox> {
    let n = rng.int_in(0, max_boxes as i64);
    (0..n)
        .map(|i| {
            let w = rng.real_in(1.0, width as f64 * 0.6 + 1.0).min(width as f64);
            let h = rng.real_in(1.0, height as f64 * 0.6 + 1.0).min(height as f64);
            let mut x = rng.real_in(0.0, width as f64 - w);
            let mut y = rng.real_in(0.0, height as f64 - h);
            if rng.int_in(0, 1) == 0 {
                x = x.floor();
                y = y.floor();
            }
            BBox::new(x, y, w, h, i + 1)
        })
        .collect()
}

/// Deterministic trial number `index` under `master_seed`.
pub fn random_trial(master_seed: u64, index: u64, max_dim: u32) -> Trial {
    let mut rng = SeededRng::new(master_seed, index);
    let max_dim = max_dim.max(1) as i64;
    let width = rng.int_in(1, max_dim) as u32;
    let height = rng.int_in(1, max_dim) as u32;
    let image = random_image(&mut rng, width, height);
    let gt = random_boxes(&mut rng, width, height, 8);
    let cfg = random_config(&mut rng);
    let seed = rng.next_u64();
    Trial { index, image, gt, cfg, seed }
}

/// First observed disagreement between the two implementations.
#[derive(Debug, Clone, PartialEq)]
pub enum Divergence {
    Dimensions { optimized: (u32, u32), reference: (u32, u32) },
    Pixel { x: u32, y: u32, optimized: [u8; 3], reference: [u8; 3] },
    OpLog { optimized: String, reference: String },
    Error(String),
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Dimensions { optimized, reference } => {
                write!(f, "dimensions differ: optimized {optimized:?}, reference {reference:?}")
            }
            Divergence::Pixel { x, y, optimized, reference } => write!(
                f,
                "pixel ({x}, {y}) differs: optimized {optimized:?}, reference {reference:?}"
            ),
            Divergence::OpLog { optimized, reference } => {
                write!(f, "op logs differ:\n  optimized: {optimized}\n  reference: {reference}")
            }
            Divergence::Error(e) => write!(f, "error: {e}"),
        }
    }
}

pub fn compare_results(optimized: &AugResult, reference: &AugResult) -> Option<Divergence> {
    let (a, b) = (&optimized.image, &reference.image);
    if a.dims() != b.dims() {
        return Some(Divergence::Dimensions { optimized: a.dims(), reference: b.dims() });
    }
    if a != b {
        for y in 0..a.height() {
            for x in 0..a.width() {
                if a.pixel(x, y) != b.pixel(x, y) {
                    return Some(Divergence::Pixel {
                        x,
                        y,
                        optimized: a.pixel(x, y),
                        reference: b.pixel(x, y),
                    });
                }
            }
        }
    }
    if optimized.log != reference.log {
        return Some(Divergence::OpLog {
            optimized: serde_json::to_string(&optimized.log).unwrap_or_default(),
            reference: serde_json::to_string(&reference.log).unwrap_or_default(),
        });
    }
    None
}

/// Run both implementations on `trial`.
pub fn run_trial(trial: &Trial, opts: OracleOptions) -> Option<Divergence> {
    let optimized = background_mixup(
        &trial.image,
        &trial.gt,
        &trial.cfg,
        &mut SeededRng::new(trial.seed, trial.index),
    );
    let reference = naive_background_mixup_with(
        &trial.image,
        &trial.gt,
        &trial.cfg,
        &mut SeededRng::new(trial.seed, trial.index),
        opts,
    );
    match (optimized, reference) {
        (Ok(a), Ok(b)) => compare_results(&a, &b),
        (Err(a), Err(b)) if a == b => None,
        (a, b) => Some(Divergence::Error(format!("{:?} vs {:?}", a.err(), b.err()))),
    }
}
