//! Background Mixup entry point.
//!
//! Complete RNG draw order for [`background_mixup`]:
//!
//! 1. gate: one `next_f64`; the image is augmented iff it is `< apply_probability`
//! 2. mode (only when augmenting): one `next_f64` against cumulative `mode_weights`
//! 3. SPM draws (see [`crate::spm`]) when the mode is `Spm` or `Both`
//! 4. CPM draws (see [`crate::cpm`]) when the mode is `Cpm` or `Both`
//!
//! This order is part of the public contract. The reference oracle consumes
//! the generator identically.

use serde::{Deserialize, Serialize};

use crate::config::{validate_config, AugConfig};
use crate::cpm::{apply_cpm, CpmOp};
use crate::error::ConfigError;
use crate::geometry::BBox;
use crate::image::RgbImage;
use crate::mask::compute_mask;
use crate::rng::{RandomSource, SeededRng};
use crate::spm::{apply_spm, SpmOp, SpmSkip};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    None,
    Spm,
    Cpm,
    /// SPM first, then CPM over its output.
    Both,
}

impl Mode {
    pub const APPLIED: [Mode; 3] = [Mode::Spm, Mode::Cpm, Mode::Both];

    pub fn runs_spm(self) -> bool {
        matches!(self, Mode::Spm | Mode::Both)
    }

    pub fn runs_cpm(self) -> bool {
        matches!(self, Mode::Cpm | Mode::Both)
    }
}

/// Everything that was done to one image, sufficient to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpLog {
    pub mode: Mode,
    pub spm_ops: Vec<SpmOp>,
    pub cpm_ops: Vec<CpmOp>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spm_skipped: Vec<SpmSkip>,
}

impl OpLog {
    pub fn untouched() -> Self {
        Self {
            mode: Mode::None,
            spm_ops: Vec::new(),
            cpm_ops: Vec::new(),
            spm_skipped: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugResult {
    pub image: RgbImage,
    pub log: OpLog,
}

/// Gate on `apply_probability`, then pick SPM / CPM / both by `mode_weights`.
pub fn choose_mode<R: RandomSource>(rng: &mut R, cfg: &AugConfig) -> Mode {
    if rng.next_f64() >= cfg.apply_probability {
        return Mode::None;
    }
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (mode, w) in Mode::APPLIED.iter().zip(cfg.mode_weights) {
        acc += w;
        if u < acc {
            return *mode;
        }
    }
    // Weights may sum to slightly less than 1; fall back to the last
    // mode that has any weight.
    Mode::APPLIED
        .iter()
        .zip(cfg.mode_weights)
        .rev()
        .find(|(_, w)| *w > 0.0)
        .map(|(m, _)| *m)
        .unwrap_or(Mode::Both)
}

/// Generator for one image of a batch. Streams are keyed by
/// `image_index`, so results do not depend on scheduling.
pub fn derive_image_rng(master_seed: u64, image_index: u64) -> SeededRng {
    SeededRng::new(master_seed, image_index)
}

/// Augment one image. Annotations are read only and are not part of the
/// result.
pub fn background_mixup<R: RandomSource>(
    img: &RgbImage,
    gt: &[BBox],
    cfg: &AugConfig,
    rng: &mut R,
) -> Result<AugResult, ConfigError> {
    let cfg = validate_config(cfg)?;
    let mode = choose_mode(rng, &cfg);
    let mut log = OpLog::untouched();
    log.mode = mode;
    if mode == Mode::None {
        return Ok(AugResult { image: img.clone(), log });
    }

    let mut image = None;
    if mode.runs_spm() {
        let mask = compute_mask(img, cfg.white_threshold);
        let out = apply_spm(img, gt, &mask, &cfg, rng);
        log.spm_ops = out.ops;
        log.spm_skipped = out.skipped;
        image = Some(out.image);
    }
    if mode.runs_cpm() {
        let base = image.as_ref().unwrap_or(img);
        let out = apply_cpm(base, &cfg, rng);
        log.cpm_ops = out.ops;
        image = Some(out.image);
    }
    Ok(AugResult {
        image: image.expect("an applied mode runs at least one component"),
        log,
    })
}
