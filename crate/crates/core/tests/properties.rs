use bgm_core::config::ClosedRange;
use bgm_core::cpm::blend_color_rect;
use bgm_core::spm::{apply_spm, blend_spm_patch, sample_source_rect};
use bgm_core::verify::{random_boxes, random_image};
use bgm_core::{
    background_mixup, clip_rect, compute_mask, AugConfig, BBox, RandomSource, Rect, RgbImage, SeededRng,
};
use proptest::prelude::*;

fn arb_image(max: u32) -> impl Strategy<Value = RgbImage> {
    (1u32..=max, 1u32..=max).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), (w * h * 3) as usize)
            .prop_map(move |d| RgbImage::from_raw(w, h, d).unwrap())
    })
}

fn within(v: u8, a: u8, b: u8) -> bool {
    let lo = a.min(b).saturating_sub(1);
    let hi = a.max(b).saturating_add(1);
    lo <= v && v <= hi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spm_blend_is_convex(
        img in arb_image(24),
        sx in 0u32..24, sy in 0u32..24, sw in 1u32..24, sh in 1u32..24,
        dx in -30i64..30, dy in -30i64..30,
        alpha in 0.0f64..=1.0,
    ) {
        let Some(src) = clip_rect(Rect::new(sx as i64, sy as i64, sw, sh), img.width(), img.height()) else {
            return Ok(());
        };
        let dst_origin = (src.x0 + dx, src.y0 + dy);
        let Ok(out) = blend_spm_patch(&img, src, dst_origin, alpha) else {
            return Ok(());
        };
        for y in 0..img.height() {
            for x in 0..img.width() {
                let (rx, ry) = (x as i64 - dst_origin.0, y as i64 - dst_origin.1);
                let inside = rx >= 0 && ry >= 0 && rx < src.w as i64 && ry < src.h as i64;
                if inside {
                    let s = img.pixel((src.x0 + rx) as u32, (src.y0 + ry) as u32);
                    let d = img.pixel(x, y);
                    let o = out.pixel(x, y);
                    for c in 0..3 {
                        prop_assert!(within(o[c], s[c], d[c]));
                    }
                } else {
                    prop_assert_eq!(out.pixel(x, y), img.pixel(x, y));
                }
            }
        }
    }

    #[test]
    fn color_blend_is_convex(
        img in arb_image(24),
        rx in 0u32..24, ry in 0u32..24, rw in 1u32..24, rh in 1u32..24,
        color in any::<[u8; 3]>(),
        alpha in 0.0f64..=1.0,
    ) {
        let Some(rect) = clip_rect(Rect::new(rx as i64, ry as i64, rw, rh), img.width(), img.height()) else {
            return Ok(());
        };
        let out = blend_color_rect(&img, rect, color, alpha);
        for y in 0..img.height() {
            for x in 0..img.width() {
                let inside = (x as i64) >= rect.x0 && (x as i64) < rect.x1()
                    && (y as i64) >= rect.y0 && (y as i64) < rect.y1();
                let (i, o) = (img.pixel(x, y), out.pixel(x, y));
                if inside {
                    for c in 0..3 {
                        prop_assert!(within(o[c], i[c], color[c]));
                    }
                } else {
                    prop_assert_eq!(o, i);
                }
            }
        }
    }

    #[test]
    fn pipeline_is_deterministic_and_keeps_dims(seed in any::<u64>(), idx in 0u64..1000, w in 1u32..40, h in 1u32..40) {
        let mut rng = SeededRng::new(seed, idx);
        let img = random_image(&mut rng, w, h);
        let gt = random_boxes(&mut rng, w, h, 4);
        let cfg = AugConfig { apply_probability: 0.9, ..Default::default() };
        let a = background_mixup(&img, &gt, &cfg, &mut SeededRng::new(seed, idx)).unwrap();
        let b = background_mixup(&img, &gt, &cfg, &mut SeededRng::new(seed, idx)).unwrap();
        prop_assert_eq!(a.image.dims(), img.dims());
        prop_assert_eq!(&a, &b);
        for op in &a.log.spm_ops {
            prop_assert!(op.src.within(w, h));
            prop_assert!(gt.iter().all(|g| !op.src.intersects_box(g)));
            prop_assert!(cfg.spm_alpha.contains(op.alpha));
        }
        for op in &a.log.cpm_ops {
            prop_assert!(op.rect.within(w, h));
            prop_assert!(cfg.cpm_alpha.contains(op.alpha));
        }
    }
}

#[test]
fn source_disjointness_over_ten_thousand_samples() {
    let cfg = AugConfig {
        spm_area_ratio: ClosedRange::new(0.05, 0.5),
        min_background_fraction: 0.0,
        ..Default::default()
    };
    let mut found = 0;
    for trial in 0..10_000u64 {
        let mut rng = SeededRng::new(77, trial);
        let (w, h) = (rng.int_in(8, 80) as u32, rng.int_in(8, 80) as u32);
        let img = random_image(&mut rng, w, h);
        let gt = random_boxes(&mut rng, w, h, 8);
        let mask = compute_mask(&img, cfg.white_threshold);
        if let Some(r) = sample_source_rect(&mut rng, (w, h), &gt, &mask, &cfg) {
            found += 1;
            assert!(r.within(w, h));
            for b in &gt {
                assert!(!r.intersects_box(b), "trial {trial}: {r:?} overlaps {b:?}");
            }
        }
    }
    assert!(found > 5_000, "only {found} sources found");
}

#[test]
fn full_cover_gt_gives_zero_ops() {
    let img = RgbImage::filled(30, 30, [10, 20, 30]).unwrap();
    let gt = [BBox::new(0.0, 0.0, 30.0, 30.0, 1)];
    let cfg = AugConfig { spm_patch_count: ClosedRange::new(3, 3), ..Default::default() };
    let mask = compute_mask(&img, 240);
    let out = apply_spm(&img, &gt, &mask, &cfg, &mut SeededRng::new(1, 0));
    assert!(out.ops.is_empty());
    assert_eq!(out.skipped.len(), 3);
    assert_eq!(out.image, img);
}

#[test]
fn tiny_images_never_fail() {
    let cfg = AugConfig { apply_probability: 1.0, ..Default::default() };
    for (w, h) in [(1, 1), (1, 7), (5, 1), (2, 3), (7, 7)] {
        let img = RgbImage::filled(w, h, [40, 40, 40]).unwrap();
        for seed in 0..50 {
            let r = background_mixup(&img, &[], &cfg, &mut SeededRng::new(seed, 0)).unwrap();
            assert_eq!(r.image.dims(), (w, h));
        }
    }
}
