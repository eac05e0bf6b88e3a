//! Color Patch Mixup.
//!
//! Semi-transparent flat-color rectangles are laid over the image to mimic
//! the material variation of pseudo-colored scans. No annotations are
//! involved.
//!
//! RNG draw order for one call of [`apply_cpm`]:
//!
//! 1. patch count `m` (one `int_in`)
//! 2. for each patch: width ratio, height ratio, `x0`, `y0`, alpha, then
//!    the color (three `int_in(0, 255)` draws, R, G, B, for [`UniformRgb`])

use serde::{Deserialize, Serialize};

use crate::blend::mix_channel;
use crate::config::AugConfig;
use crate::image::RgbImage;
use crate::geometry::Rect;
use crate::rng::RandomSource;
use crate::spm::sample_in_image_rect;

/// One applied CPM patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpmOp {
    pub rect: Rect,
    pub color: [u8; 3],
    pub alpha: f64,
}

/// Strategy for picking patch colors.
pub trait ColorSampler {
    fn sample_color<R: RandomSource>(&self, rng: &mut R) -> [u8; 3];
}

/// Each channel independently uniform over `0..=255`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformRgb;

impl ColorSampler for UniformRgb {
    fn sample_color<R: RandomSource>(&self, rng: &mut R) -> [u8; 3] {
        let r = rng.int_in(0, 255) as u8;
        let g = rng.int_in(0, 255) as u8;
        let b = rng.int_in(0, 255) as u8;
        [r, g, b]
    }
}

pub fn sample_color<R: RandomSource>(rng: &mut R) -> [u8; 3] {
    UniformRgb.sample_color(rng)
}

/// Patch rect from independent width/height ratio draws, with an origin
/// that keeps it inside the image.
pub fn sample_cpm_rect<R: RandomSource>(rng: &mut R, img_dims: (u32, u32), cfg: &AugConfig) -> Rect {
    sample_in_image_rect(rng, &cfg.cpm_area_ratio, img_dims)
}

pub(crate) fn blend_color_into(img: &mut RgbImage, rect: Rect, color: [u8; 3], alpha: f64) {
    debug_assert!(rect.within(img.width(), img.height()));
    // Per-channel table of every possible output.
    let mut lut = [[0u8; 256]; 3];
    for (c, table) in lut.iter_mut().enumerate() {
        for (v, slot) in table.iter_mut().enumerate() {
            *slot = mix_channel(alpha, color[c], v as u8);
        }
    }
    for row in 0..rect.h {
        let span = img.row_span_mut(rect.y0 as u32 + row, rect.x0 as u32, rect.w);
        for px in span.chunks_exact_mut(3) {
            px[0] = lut[0][px[0] as usize];
            px[1] = lut[1][px[1] as usize];
            px[2] = lut[2][px[2] as usize];
        }
    }
}

/// `(1 - alpha) * pixel + alpha * color` over `rect`; everything else is
/// copied unchanged.
pub fn blend_color_rect(img: &RgbImage, rect: Rect, color: [u8; 3], alpha: f64) -> RgbImage {
    let mut out = img.clone();
    blend_color_into(&mut out, rect, color, alpha);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpmOutcome {
    pub image: RgbImage,
    pub ops: Vec<CpmOp>,
}

pub fn apply_cpm<R: RandomSource>(img: &RgbImage, cfg: &AugConfig, rng: &mut R) -> CpmOutcome {
    apply_cpm_with(img, cfg, rng, &UniformRgb)
}

/// [`apply_cpm`] with a custom color strategy. Later patches blend over
/// earlier ones.
pub fn apply_cpm_with<R: RandomSource, C: ColorSampler>(
    img: &RgbImage,
    cfg: &AugConfig,
    rng: &mut R,
    colors: &C,
) -> CpmOutcome {
    let dims = img.dims();
    let m = cfg.cpm_patch_count.sample(rng);
    let mut out = img.clone();
    let mut ops = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let rect = sample_cpm_rect(rng, dims, cfg);
        let alpha = cfg.cpm_alpha.sample(rng);
        let color = colors.sample_color(rng);
        blend_color_into(&mut out, rect, color, alpha);
        ops.push(CpmOp { rect, color, alpha });
    }
    CpmOutcome { image: out, ops }
}
