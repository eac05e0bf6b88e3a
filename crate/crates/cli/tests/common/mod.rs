//! Synthetic X-ray-like fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use bgm_core::{RandomSource, RgbImage, SeededRng};
use bgm_dataset::{save_dataset, save_image, Annotation, Category, Dataset, ImageEntry};
use serde_json::{json, Map};

/// Near-white background with a few dark, tinted objects. Returns the image
/// and the object rectangles as `[x, y, w, h]`.
pub fn xray_image(rng: &mut SeededRng, width: u32, height: u32) -> (RgbImage, Vec<[f64; 4]>) {
    let mut img = RgbImage::from_fn(width, height, |_, _| {
        let v = rng.int_in(245, 255) as u8;
        [v, v, v]
    })
    .unwrap();
    let mut objects = Vec::new();
    for _ in 0..rng.int_in(1, 4) {
        let w = rng.int_in(1, (width / 3).max(1) as i64) as u32;
        let h = rng.int_in(1, (height / 3).max(1) as i64) as u32;
        let x = rng.int_in(0, (width - w) as i64) as u32;
        let y = rng.int_in(0, (height - h) as i64) as u32;
        let tint = [rng.int_in(20, 200) as u8, rng.int_in(20, 200) as u8, rng.int_in(20, 200) as u8];
        for yy in y..y + h {
            for xx in x..x + w {
                img.set_pixel(xx, yy, tint);
            }
        }
        objects.push([x as f64, y as f64, w as f64, h as f64]);
    }
    (img, objects)
}

/// Write `count` PNG images plus a COCO annotation file into `dir`.
/// Every object becomes an annotation; images and annotations carry extra
/// fields that must survive a round trip.
pub fn write_dataset(dir: &Path, count: usize, dims: (u32, u32), seed: u64) -> PathBuf {
    let mut rng = SeededRng::new(seed, 0);
    let mut images = Vec::new();
    let mut annotations = Vec::new();
    for i in 0..count {
        let w = rng.int_in(dims.0 as i64, dims.1 as i64) as u32;
        let h = rng.int_in(dims.0 as i64, dims.1 as i64) as u32;
        let (img, objects) = xray_image(&mut rng, w, h);
        let file_name = format!("scan_{i:03}.png");
        save_image(&img, &dir.join(&file_name)).unwrap();
        let mut extra = Map::new();
        extra.insert("date_captured".into(), json!("2021-03-04"));
        images.push(ImageEntry { id: 100 + i as u64, file_name, width: w, height: h, extra });
        for bbox in objects {
            let mut extra = Map::new();
            extra.insert("iscrowd".into(), json!(0));
            extra.insert("area".into(), json!(bbox[2] * bbox[3]));
            annotations.push(Annotation {
                id: annotations.len() as u64 + 1,
                image_id: 100 + i as u64,
                bbox,
                category_id: rng.int_in(1, 3),
                extra,
            });
        }
    }
    let categories = ["gun", "knife", "scissors"]
        .iter()
        .enumerate()
        .map(|(i, n)| Category { id: i as i64 + 1, name: n.to_string(), extra: Map::new() })
        .collect();
    let mut extra = Map::new();
    extra.insert("info".into(), json!({"description": "synthetic baggage scans"}));
    let ds = Dataset { images, annotations, categories, extra };
    let path = dir.join("annotations.json");
    save_dataset(&ds, &path).unwrap();
    path
}
