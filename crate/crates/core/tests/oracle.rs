//! Optimized paths against the naive reference, bit for bit.

use bgm_core::config::ClosedRange;
use bgm_core::cpm::apply_cpm;
use bgm_core::reference::{naive_background_mixup, naive_cpm, naive_spm, OracleOptions, Rounding};
use bgm_core::spm::apply_spm;
use bgm_core::verify::{random_trial, run_trial, Divergence};
use bgm_core::{background_mixup, compute_mask, AugConfig, BBox, Mode, RgbImage, SeededRng};

fn fixture_64() -> RgbImage {
    RgbImage::from_fn(64, 64, |x, y| {
        if x < 8 || y > 56 {
            [250, 250, 250]
        } else {
            [(x * 3 + y) as u8, (y * 4) as u8, (200 - x * 2) as u8]
        }
    })
    .unwrap()
}

fn two_boxes() -> Vec<BBox> {
    vec![BBox::new(10.0, 12.0, 18.0, 14.0, 1), BBox::new(36.5, 30.0, 20.0, 22.5, 2)]
}

#[test]
fn spm_matches_reference_on_fixture() {
    let img = fixture_64();
    let gt = vec![BBox::new(20.0, 20.0, 16.0, 16.0, 1)];
    let cfg = AugConfig {
        spm_patch_count: ClosedRange::new(2, 5),
        ..Default::default()
    };
    for seed in 0..50 {
        let mask = compute_mask(&img, cfg.white_threshold);
        let fast = apply_spm(&img, &gt, &mask, &cfg, &mut SeededRng::new(seed, 0));
        let (image, ops, skipped) =
            naive_spm(&img, &gt, &cfg, &mut SeededRng::new(seed, 0), OracleOptions::default());
        assert_eq!(fast.image, image, "seed {seed}");
        assert_eq!(fast.ops, ops);
        assert_eq!(fast.skipped, skipped);
    }
}

#[test]
fn cpm_matches_reference_on_fixture() {
    let img = fixture_64();
    let cfg = AugConfig {
        cpm_patch_count: ClosedRange::new(1, 6),
        cpm_area_ratio: ClosedRange::new(0.05, 0.6),
        ..Default::default()
    };
    for seed in 0..50 {
        let fast = apply_cpm(&img, &cfg, &mut SeededRng::new(seed, 1));
        let (image, ops) = naive_cpm(&img, &cfg, &mut SeededRng::new(seed, 1), OracleOptions::default());
        assert_eq!(fast.image, image, "seed {seed}");
        assert_eq!(fast.ops, ops);
    }
}

#[test]
fn seed_1234_two_box_fixture() {
    let img = fixture_64();
    let cfg = AugConfig {
        apply_probability: 1.0,
        ..Default::default()
    };
    let fast = background_mixup(&img, &two_boxes(), &cfg, &mut SeededRng::new(1234, 0)).unwrap();
    let slow = naive_background_mixup(&img, &two_boxes(), &cfg, &mut SeededRng::new(1234, 0)).unwrap();
    assert_ne!(fast.log.mode, Mode::None);
    assert_eq!(fast, slow);
}

#[test]
fn trivial_cases_agree() {
    let img = fixture_64();
    let configs = [
        AugConfig { apply_probability: 0.0, ..Default::default() },
        AugConfig {
            apply_probability: 1.0,
            spm_alpha: ClosedRange::new(0.0, 0.0),
            cpm_alpha: ClosedRange::new(0.0, 0.0),
            ..Default::default()
        },
        AugConfig {
            apply_probability: 1.0,
            spm_patch_count: ClosedRange::new(0, 0),
            cpm_patch_count: ClosedRange::new(0, 0),
            ..Default::default()
        },
    ];
    for cfg in configs {
        for seed in 0..10 {
            let fast = background_mixup(&img, &two_boxes(), &cfg, &mut SeededRng::new(seed, 3)).unwrap();
            let slow = naive_background_mixup(&img, &two_boxes(), &cfg, &mut SeededRng::new(seed, 3)).unwrap();
            assert_eq!(fast, slow);
            assert_eq!(fast.image, img);
        }
    }
}

#[test]
fn two_hundred_random_trials_are_bit_equal() {
    let mut applied = 0;
    for i in 0..200 {
        let trial = random_trial(0xB6_u64, i, 96);
        if let Some(d) = run_trial(&trial, OracleOptions::default()) {
            panic!("trial {i} diverged: {d}");
        }
        let r = background_mixup(&trial.image, &trial.gt, &trial.cfg, &mut SeededRng::new(trial.seed, i)).unwrap();
        applied += (r.log.mode != Mode::None) as usize;
    }
    assert!(applied > 100, "only {applied} trials exercised augmentation");
}

#[test]
fn perturbed_rounding_is_detected() {
    let opts = OracleOptions { rounding: Rounding::Truncate };
    let caught = (0..200).find_map(|i| run_trial(&random_trial(7, i, 96), opts));
    match caught {
        Some(Divergence::Pixel { optimized, reference, .. }) => assert_ne!(optimized, reference),
        other => panic!("mutation not detected as a pixel diff: {other:?}"),
    }
}
