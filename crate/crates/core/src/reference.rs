//! Naive reference implementation of Background Mixup.
//!
//! Every step is a scalar per-pixel loop over freshly allocated copies;
//! nothing here calls into the optimized SPM/CPM/mask code. Only the RNG
//! contract and the result types are shared, so any disagreement between
//! [`naive_background_mixup`] and [`crate::pipeline::background_mixup`]
//! points at a real bug in one of them.

use crate::config::{validate_config, AugConfig};
use crate::cpm::CpmOp;
use crate::error::ConfigError;
use crate::geometry::{BBox, Rect};
use crate::image::RgbImage;
use crate::pipeline::{AugResult, Mode, OpLog};
use crate::rng::RandomSource;
use crate::spm::{SkipReason, SpmOp, SpmSkip};

/// Rounding applied to blended values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    /// The library rule.
    #[default]
    HalfAwayFromZero,
    /// Truncation toward zero. Only useful as a deliberate mutation to
    /// prove that the equivalence check can fail.
    Truncate,
}

impl Rounding {
    fn apply(self, v: f64) -> f64 {
        match self {
            Rounding::HalfAwayFromZero => {
                let f = v.abs().floor();
                let r = if v.abs() - f >= 0.5 { f + 1.0 } else { f };
                r.copysign(v)
            }
            Rounding::Truncate => v.trunc(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleOptions {
    pub rounding: Rounding,
}

fn blend_value(opts: OracleOptions, alpha: f64, top: u8, bottom: u8) -> u8 {
    let v = alpha * (top as f64) + (1.0 - alpha) * (bottom as f64);
    let r = opts.rounding.apply(v);
    if r < 0.0 {
        0
    } else if r > 255.0 {
        255
    } else {
        r as u8
    }
}

fn round_side(u: f64, dim: u32) -> u32 {
    let v = Rounding::HalfAwayFromZero.apply(u * dim as f64);
    let mut s = v as i64;
    if s < 1 {
        s = 1;
    }
    if s > dim as i64 {
        s = dim as i64;
    }
    s as u32
}

fn boxes_overlap(x0: i64, y0: i64, w: u32, h: u32, b: &BBox) -> bool {
    let (ax0, ay0) = (x0 as f64, y0 as f64);
    let (ax1, ay1) = ((x0 + w as i64) as f64, (y0 + h as i64) as f64);
    let (bx1, by1) = (b.x + b.w, b.y + b.h);
    let x_sep = ax1 <= b.x || bx1 <= ax0;
    let y_sep = ay1 <= b.y || by1 <= ay0;
    !(x_sep || y_sep)
}

fn content_pixels(img: &RgbImage, x0: i64, y0: i64, w: u32, h: u32, threshold: u32) -> u64 {
    let mut n = 0;
    for y in y0..y0 + h as i64 {
        for x in x0..x0 + w as i64 {
            let p = img.pixel(x as u32, y as u32);
            let darkest = *p.iter().min().unwrap() as u32;
            if darkest < threshold {
                n += 1;
            }
        }
    }
    n
}

fn sample_geometry<R: RandomSource>(
    rng: &mut R,
    lo: f64,
    hi: f64,
    width: u32,
    height: u32,
) -> (i64, i64, u32, u32) {
    let uw = rng.real_in(lo, hi);
    let w = round_side(uw, width);
    let uh = rng.real_in(lo, hi);
    let h = round_side(uh, height);
    let x0 = rng.int_in(0, (width - w) as i64);
    let y0 = rng.int_in(0, (height - h) as i64);
    (x0, y0, w, h)
}

/// Reference SPM. Returns the image plus op records and skips.
pub fn naive_spm<R: RandomSource>(
    img: &RgbImage,
    gt: &[BBox],
    cfg: &AugConfig,
    rng: &mut R,
    opts: OracleOptions,
) -> (RgbImage, Vec<SpmOp>, Vec<SpmSkip>) {
    let (width, height) = (img.width(), img.height());
    let original = img.clone();
    let mut current = img.clone();
    let mut ops = Vec::new();
    let mut skipped = Vec::new();

    let n = rng.int_in(cfg.spm_patch_count.lo as i64, cfg.spm_patch_count.hi as i64) as u32;
    for patch in 0..n {
        let mut found = None;
        let mut attempt = 0;
        while attempt < cfg.max_sample_attempts {
            attempt += 1;
            let (x0, y0, w, h) =
                sample_geometry(rng, cfg.spm_area_ratio.lo, cfg.spm_area_ratio.hi, width, height);
            if gt.iter().any(|b| boxes_overlap(x0, y0, w, h, b)) {
                continue;
            }
            let content = content_pixels(&original, x0, y0, w, h, cfg.white_threshold);
            let fraction = content as f64 / (w as f64 * h as f64);
            if fraction >= cfg.min_background_fraction {
                found = Some((x0, y0, w, h));
                break;
            }
        }
        let Some((sx, sy, w, h)) = found else {
            skipped.push(SpmSkip { patch, reason: SkipReason::NoSource });
            continue;
        };

        let dx = rng.int_in(-(width as i64 - 1), width as i64 - 1);
        let dy = rng.int_in(-(height as i64 - 1), height as i64 - 1);
        let alpha = rng.real_in(cfg.spm_alpha.lo, cfg.spm_alpha.hi);

        let mut next = current.clone();
        let mut touched = false;
        for j in 0..h as i64 {
            for i in 0..w as i64 {
                let tx = sx + dx + i;
                let ty = sy + dy + j;
                if tx < 0 || ty < 0 || tx >= width as i64 || ty >= height as i64 {
                    continue;
                }
                touched = true;
                let s = original.pixel((sx + i) as u32, (sy + j) as u32);
                let d = current.pixel(tx as u32, ty as u32);
                let mut px = [0u8; 3];
                for c in 0..3 {
                    px[c] = blend_value(opts, alpha, s[c], d[c]);
                }
                next.set_pixel(tx as u32, ty as u32, px);
            }
        }
        if touched {
            current = next;
            ops.push(SpmOp {
                src: Rect::new(sx, sy, w, h),
                dst_origin: (sx + dx, sy + dy),
                alpha,
            });
        } else {
            skipped.push(SpmSkip { patch, reason: SkipReason::EmptyDestination });
        }
    }
    (current, ops, skipped)
}

/// Reference CPM.
pub fn naive_cpm<R: RandomSource>(
    img: &RgbImage,
    cfg: &AugConfig,
    rng: &mut R,
    opts: OracleOptions,
) -> (RgbImage, Vec<CpmOp>) {
    let (width, height) = (img.width(), img.height());
    let mut current = img.clone();
    let mut ops = Vec::new();
    let m = rng.int_in(cfg.cpm_patch_count.lo as i64, cfg.cpm_patch_count.hi as i64) as u32;
    for _ in 0..m {
        let (x0, y0, w, h) =
            sample_geometry(rng, cfg.cpm_area_ratio.lo, cfg.cpm_area_ratio.hi, width, height);
        let alpha = rng.real_in(cfg.cpm_alpha.lo, cfg.cpm_alpha.hi);
        let mut color = [0u8; 3];
        for c in color.iter_mut() {
            *c = rng.int_in(0, 255) as u8;
        }
        let mut next = current.clone();
        for y in y0..y0 + h as i64 {
            for x in x0..x0 + w as i64 {
                let p = current.pixel(x as u32, y as u32);
                let mut px = [0u8; 3];
                for c in 0..3 {
                    px[c] = blend_value(opts, alpha, color[c], p[c]);
                }
                next.set_pixel(x as u32, y as u32, px);
            }
        }
        current = next;
        ops.push(CpmOp { rect: Rect::new(x0, y0, w, h), color, alpha });
    }
    (current, ops)
}

pub fn naive_background_mixup<R: RandomSource>(
    img: &RgbImage,
    gt: &[BBox],
    cfg: &AugConfig,
    rng: &mut R,
) -> Result<AugResult, ConfigError> {
    naive_background_mixup_with(img, gt, cfg, rng, OracleOptions::default())
}

pub fn naive_background_mixup_with<R: RandomSource>(
    img: &RgbImage,
    gt: &[BBox],
    cfg: &AugConfig,
    rng: &mut R,
    opts: OracleOptions,
) -> Result<AugResult, ConfigError> {
    let cfg = validate_config(cfg)?;
    let gate = rng.next_f64();
    let mut log = OpLog::untouched();
    if gate >= cfg.apply_probability {
        return Ok(AugResult { image: img.clone(), log });
    }

    let u = rng.next_f64();
    let [w_spm, w_cpm, w_both] = cfg.mode_weights;
    let mode = if u < w_spm {
        Mode::Spm
    } else if u < w_spm + w_cpm {
        Mode::Cpm
    } else if u < w_spm + w_cpm + w_both || w_both > 0.0 {
        Mode::Both
    } else if w_cpm > 0.0 {
        Mode::Cpm
    } else if w_spm > 0.0 {
        Mode::Spm
    } else {
        Mode::Both
    };
    log.mode = mode;

    let mut image = img.clone();
    if matches!(mode, Mode::Spm | Mode::Both) {
        let (out, ops, skipped) = naive_spm(&image, gt, &cfg, rng, opts);
        image = out;
        log.spm_ops = ops;
        log.spm_skipped = skipped;
    }
    if matches!(mode, Mode::Cpm | Mode::Both) {
        let (out, ops) = naive_cpm(&image, &cfg, rng, opts);
        image = out;
        log.cpm_ops = ops;
    }
    Ok(AugResult { image, log })
}
