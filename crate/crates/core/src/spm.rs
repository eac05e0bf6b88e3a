//! Self Patch Mixup.
//!
//! Background patches that avoid every ground-truth box are copied from the
//! image, shifted by a random offset and alpha-blended at their new
//! location. Destinations may overlap objects; sources never do.
//!
//! RNG draw order for one call of [`apply_spm`]:
//!
//! 1. patch count `n` (one `int_in`)
//! 2. for each patch:
//!    - source rect, per attempt: width ratio, height ratio, `x0`, `y0`
//!      (repeated until accepted or `max_sample_attempts` is reached;
//!      a patch with no accepted source stops here)
//!    - offset `dx`, then `dy`
//!    - alpha

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blend::mix_channel;
use crate::config::{AugConfig, ClosedRange};
use crate::geometry::{clip_rect, BBox, Rect};
use crate::image::RgbImage;
use crate::mask::BackgroundMask;
use crate::rng::RandomSource;

/// One applied SPM patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpmOp {
    pub src: Rect,
    /// Unclipped destination origin, `src` origin plus the sampled offset.
    pub dst_origin: (i64, i64),
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    /// Rejection sampling found no admissible source rect.
    NoSource,
    /// The moved patch fell entirely outside the image.
    EmptyDestination,
}

/// A patch slot that produced no blend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpmSkip {
    pub patch: u32,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BlendError {
    #[error("destination rect lies outside the image")]
    DegenerateDst,
}

/// Patch side length: `round(u * dim)` clamped to `[1, dim]`.
#[inline]
pub(crate) fn side_from_ratio(u: f64, dim: u32) -> u32 {
    ((u * dim as f64).round() as u32).clamp(1, dim)
}

/// Width then height, each from an independent ratio draw. Two draws.
pub(crate) fn sample_patch_size<R: RandomSource>(
    rng: &mut R,
    ratio: &ClosedRange<f64>,
    (width, height): (u32, u32),
) -> (u32, u32) {
    let w = side_from_ratio(ratio.sample(rng), width);
    let h = side_from_ratio(ratio.sample(rng), height);
    (w, h)
}

/// Size then in-image origin. Four draws.
pub(crate) fn sample_in_image_rect<R: RandomSource>(
    rng: &mut R,
    ratio: &ClosedRange<f64>,
    dims: (u32, u32),
) -> Rect {
    let (w, h) = sample_patch_size(rng, ratio, dims);
    let x0 = rng.int_in(0, (dims.0 - w) as i64);
    let y0 = rng.int_in(0, (dims.1 - h) as i64);
    Rect::new(x0, y0, w, h)
}

/// Rejection-sample a source patch disjoint from all `gt` boxes with at
/// least `min_background_fraction` content pixels.
pub fn sample_source_rect<R: RandomSource>(
    rng: &mut R,
    img_dims: (u32, u32),
    gt: &[BBox],
    mask: &BackgroundMask,
    cfg: &AugConfig,
) -> Option<Rect> {
    debug_assert_eq!((mask.width(), mask.height()), img_dims);
    for _ in 0..cfg.max_sample_attempts {
        let r = sample_in_image_rect(rng, &cfg.spm_area_ratio, img_dims);
        if gt.iter().any(|b| r.intersects_box(b)) {
            continue;
        }
        if mask.content_fraction(&r) >= cfg.min_background_fraction {
            return Some(r);
        }
    }
    None
}

/// Uniform shift in `[-(W-1), W-1] × [-(H-1), H-1]`.
pub fn sample_offset<R: RandomSource>(rng: &mut R, (width, height): (u32, u32)) -> (i64, i64) {
    let mx = width as i64 - 1;
    let my = height as i64 - 1;
    let dx = rng.int_in(-mx, mx);
    let dy = rng.int_in(-my, my);
    (dx, dy)
}

/// Clipped destination and the matching sub-rect of the source.
pub(crate) fn clipped_pair(
    src: Rect,
    dst_origin: (i64, i64),
    (width, height): (u32, u32),
) -> Option<(Rect, Rect)> {
    let dst = Rect::new(dst_origin.0, dst_origin.1, src.w, src.h);
    let d = clip_rect(dst, width, height)?;
    let s = Rect::new(src.x0 + (d.x0 - dst.x0), src.y0 + (d.y0 - dst.y0), d.w, d.h);
    Some((s, d))
}

/// Blend `source[src]` onto `target` at `dst_origin`. Source and target
/// must share dimensions; they are distinct buffers so sources are never
/// read from partially blended output.
pub(crate) fn blend_patch_into(
    source: &RgbImage,
    target: &mut RgbImage,
    src: Rect,
    dst_origin: (i64, i64),
    alpha: f64,
) -> Result<Rect, BlendError> {
    let (s, d) = clipped_pair(src, dst_origin, target.dims()).ok_or(BlendError::DegenerateDst)?;
    for row in 0..d.h {
        let src_row = source.row_span(s.y0 as u32 + row, s.x0 as u32, s.w);
        let dst_row = target.row_span_mut(d.y0 as u32 + row, d.x0 as u32, d.w);
        for (o, &p) in dst_row.iter_mut().zip(src_row) {
            *o = mix_channel(alpha, p, *o);
        }
    }
    Ok(d)
}

/// Blend the `src` region of `img` at `dst_origin` with transparency
/// `alpha`, returning a new image.
pub fn blend_spm_patch(
    img: &RgbImage,
    src: Rect,
    dst_origin: (i64, i64),
    alpha: f64,
) -> Result<RgbImage, BlendError> {
    debug_assert!(src.within(img.width(), img.height()));
    let mut out = img.clone();
    blend_patch_into(img, &mut out, src, dst_origin, alpha)?;
    Ok(out)
}

/// Output of [`apply_spm`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpmOutcome {
    pub image: RgbImage,
    pub ops: Vec<SpmOp>,
    pub skipped: Vec<SpmSkip>,
}

/// Run SPM over one image. `gt` is read only; labels are never touched.
pub fn apply_spm<R: RandomSource>(
    img: &RgbImage,
    gt: &[BBox],
    mask: &BackgroundMask,
    cfg: &AugConfig,
    rng: &mut R,
) -> SpmOutcome {
    let dims = img.dims();
    let n = cfg.spm_patch_count.sample(rng);
    let mut out = img.clone();
    let mut ops = Vec::with_capacity(n as usize);
    let mut skipped = Vec::new();

    for patch in 0..n {
        let Some(src) = sample_source_rect(rng, dims, gt, mask, cfg) else {
            skipped.push(SpmSkip { patch, reason: SkipReason::NoSource });
            continue;
        };
        let (dx, dy) = sample_offset(rng, dims);
        let alpha = cfg.spm_alpha.sample(rng);
        let dst_origin = (src.x0 + dx, src.y0 + dy);
        match blend_patch_into(img, &mut out, src, dst_origin, alpha) {
            Ok(_) => ops.push(SpmOp { src, dst_origin, alpha }),
            Err(BlendError::DegenerateDst) => skipped.push(SpmSkip {
                patch,
                reason: SkipReason::EmptyDestination,
            }),
        }
    }

    SpmOutcome { image: out, ops, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::compute_mask;
    use crate::rng::SeededRng;

    struct Constant(u64);

    impl RandomSource for Constant {
        fn next_u64(&mut self) -> u64 {
            self.0
        }
    }

    fn gradient(w: u32, h: u32) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| [(x * 3) as u8, (y * 5) as u8, ((x + y) * 7) as u8]).unwrap()
    }

    fn full_mask(w: u32, h: u32) -> BackgroundMask {
        BackgroundMask::from_bits(w, h, vec![true; (w * h) as usize])
    }

    #[test]
    fn gt_covering_image_yields_none() {
        let cfg = AugConfig::default();
        let gt = [BBox::new(0.0, 0.0, 64.0, 64.0, 1)];
        let mut rng = SeededRng::new(3, 0);
        assert_eq!(sample_source_rect(&mut rng, (64, 64), &gt, &full_mask(64, 64), &cfg), None);
    }

    #[test]
    fn forced_size_without_gt() {
        let cfg = AugConfig {
            spm_area_ratio: ClosedRange::new(0.1, 0.1),
            ..Default::default()
        };
        for seed in 0..50 {
            let mut rng = SeededRng::new(seed, 0);
            let r = sample_source_rect(&mut rng, (100, 100), &[], &full_mask(100, 100), &cfg).unwrap();
            assert_eq!((r.w, r.h), (10, 10));
            assert!(r.within(100, 100));
        }
    }

    // Golden rect from scripts/rng_vectors.py.
    #[test]
    fn left_half_gt_seed_42() {
        let cfg = AugConfig {
            spm_area_ratio: ClosedRange::new(0.2, 0.2),
            ..Default::default()
        };
        let gt = [BBox::new(0.0, 0.0, 50.0, 100.0, 1)];
        let mut rng = SeededRng::new(42, 0);
        let r = sample_source_rect(&mut rng, (100, 100), &gt, &full_mask(100, 100), &cfg).unwrap();
        assert!(r.x0 >= 50);
        assert_eq!(r, Rect::new(53, 16, 20, 20));
    }

    #[test]
    fn white_sources_are_rejected() {
        let img = RgbImage::filled(32, 32, [255, 255, 255]).unwrap();
        let mask = compute_mask(&img, 240);
        let mut rng = SeededRng::new(1, 1);
        assert_eq!(sample_source_rect(&mut rng, (32, 32), &[], &mask, &AugConfig::default()), None);
    }

    #[test]
    fn offsets_at_degenerate_words() {
        assert_eq!(sample_offset(&mut Constant(1 << 63), (100, 100)), (0, 0));
        let mut rng = SeededRng::new(8, 8);
        for _ in 0..100 {
            assert_eq!(sample_offset(&mut rng, (1, 1)), (0, 0));
        }
    }

    #[test]
    fn mean_absolute_offset() {
        // E|U{-99..99}| = 2 * (1 + ... + 99) / 199 = 9900 / 199
        let exact = (1..=99).map(|k| 2.0 * k as f64).sum::<f64>() / 199.0;
        let mut rng = SeededRng::new(2024, 0);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| sample_offset(&mut rng, (100, 100)).0.abs() as f64)
            .sum::<f64>()
            / n as f64;
        assert!((mean - exact).abs() < 1.5, "mean {mean}, expected {exact}");
        assert!((mean - 49.7).abs() < 1.5);
    }

    #[test]
    fn blend_alpha_endpoints() {
        let img = gradient(20, 20);
        let src = Rect::new(2, 3, 5, 4);
        assert_eq!(blend_spm_patch(&img, src, (10, 10), 0.0).unwrap(), img);

        let out = blend_spm_patch(&img, src, (10, 11), 1.0).unwrap();
        for y in 0..4 {
            for x in 0..5 {
                assert_eq!(out.pixel(10 + x, 11 + y), img.pixel(2 + x, 3 + y));
            }
        }
    }

    #[test]
    fn blend_midpoint_and_half_rounding() {
        let mut img = RgbImage::filled(4, 1, [100, 100, 100]).unwrap();
        img.set_pixel(0, 0, [200, 201, 0]);
        let out = blend_spm_patch(&img, Rect::new(0, 0, 1, 1), (3, 0), 0.5).unwrap();
        assert_eq!(out.pixel(3, 0), [150, 151, 50]);
        assert_eq!(out.pixel(1, 0), [100, 100, 100]);
    }

    #[test]
    fn blend_clips_and_keeps_relative_offsets() {
        let img = gradient(10, 10);
        let out = blend_spm_patch(&img, Rect::new(0, 0, 4, 4), (8, -2), 1.0).unwrap();
        // Surviving part: dst x 8..10, y 0..2 <- src x 0..2, y 2..4.
        for y in 0..2 {
            for x in 0..2 {
                assert_eq!(out.pixel(8 + x, y), img.pixel(x, 2 + y));
            }
        }
        assert_eq!(out.pixel(7, 0), img.pixel(7, 0));
        assert_eq!(
            blend_spm_patch(&img, Rect::new(0, 0, 4, 4), (10, 0), 0.5),
            Err(BlendError::DegenerateDst)
        );
    }

    #[test]
    fn sources_read_from_snapshot() {
        // Patch B reads a source region that patch A already overwrote in
        // the output; the blend must still use the original pixels.
        let img = gradient(12, 1);
        let mut out = img.clone();
        blend_patch_into(&img, &mut out, Rect::new(0, 0, 3, 1), (6, 0), 1.0).unwrap();
        blend_patch_into(&img, &mut out, Rect::new(6, 0, 3, 1), (0, 0), 1.0).unwrap();
        for x in 0..3 {
            assert_eq!(out.pixel(x, 0), img.pixel(6 + x, 0));
            assert_eq!(out.pixel(6 + x, 0), img.pixel(x, 0));
        }
    }

    #[test]
    fn zero_patches_or_zero_alpha_is_identity() {
        let img = gradient(40, 30);
        let mask = full_mask(40, 30);
        let gt = [BBox::new(5.0, 5.0, 10.0, 10.0, 2)];
        let cfg = AugConfig {
            spm_patch_count: ClosedRange::new(0, 0),
            ..Default::default()
        };
        let o = apply_spm(&img, &gt, &mask, &cfg, &mut SeededRng::new(1, 0));
        assert_eq!(o.image, img);
        assert!(o.ops.is_empty() && o.skipped.is_empty());

        let cfg = AugConfig {
            spm_patch_count: ClosedRange::new(3, 6),
            spm_alpha: ClosedRange::new(0.0, 0.0),
            ..Default::default()
        };
        for seed in 0..20 {
            let o = apply_spm(&img, &gt, &mask, &cfg, &mut SeededRng::new(seed, 0));
            assert_eq!(o.image, img);
            assert_eq!(o.ops.len() + o.skipped.len(), cfg.spm_patch_count.sample(&mut SeededRng::new(seed, 0)) as usize);
        }
    }

    #[test]
    fn logged_sources_avoid_gt_and_pixels_outside_dsts_are_untouched() {
        let img = gradient(48, 40);
        let mask = full_mask(48, 40);
        let gt = [BBox::new(4.0, 4.0, 12.0, 20.0, 1), BBox::new(30.0, 20.0, 10.5, 9.5, 2)];
        let cfg = AugConfig {
            spm_patch_count: ClosedRange::new(1, 4),
            ..Default::default()
        };
        for seed in 0..200 {
            let o = apply_spm(&img, &gt, &mask, &cfg, &mut SeededRng::new(seed, 9));
            let dsts: Vec<Rect> = o
                .ops
                .iter()
                .map(|op| clipped_pair(op.src, op.dst_origin, (48, 40)).unwrap().1)
                .collect();
            for op in &o.ops {
                assert!(gt.iter().all(|b| !op.src.intersects_box(b)));
                assert!(op.src.within(48, 40));
                assert!(cfg.spm_alpha.contains(op.alpha));
            }
            for y in 0..40 {
                for x in 0..48 {
                    let inside = dsts.iter().any(|d| {
                        (x as i64) >= d.x0 && (x as i64) < d.x1() && (y as i64) >= d.y0 && (y as i64) < d.y1()
                    });
                    if !inside {
                        assert_eq!(o.image.pixel(x, y), img.pixel(x, y));
                    }
                }
            }
        }
    }
}
