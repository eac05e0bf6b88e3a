//! COCO-style detection annotations, restricted to what augmentation needs.
//!
//! Recognised keys: top-level `images`, `annotations`, `categories`;
//! per image `id`, `file_name`, `width`, `height`; per annotation `id`,
//! `image_id`, `bbox` (`[x, y, w, h]`), `category_id`; per category `id`,
//! `name`. Any other keys are carried through untouched.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use bgm_core::BBox;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::DatasetError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: u64,
    pub image_id: u64,
    pub bbox: [f64; 4],
    pub category_id: i64,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Annotation {
    pub fn to_bbox(&self) -> BBox {
        let [x, y, w, h] = self.bbox;
        BBox::new(x, y, w, h, self.category_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub id: i64,
    pub name: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub images: Vec<ImageEntry>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    #[serde(default)]
    pub categories: Vec<Category>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

/// What load-time sanitising changed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    /// Boxes that extended past their image and were clamped.
    pub clamped: usize,
    /// Boxes with no area left inside their image, removed.
    pub dropped: usize,
}

impl Dataset {
    pub fn image(&self, id: u64) -> Option<&ImageEntry> {
        self.images.iter().find(|im| im.id == id)
    }

    /// Ground-truth boxes per image, in `images` order.
    pub fn boxes_by_image(&self) -> Vec<Vec<BBox>> {
        let index: std::collections::HashMap<u64, usize> =
            self.images.iter().enumerate().map(|(i, im)| (im.id, i)).collect();
        let mut out = vec![Vec::new(); self.images.len()];
        for a in &self.annotations {
            if let Some(&i) = index.get(&a.image_id) {
                out[i].push(a.to_bbox());
            }
        }
        out
    }

    /// Enforce reference integrity and clamp boxes to their image bounds.
    pub fn sanitize(&mut self) -> Result<LoadReport, DatasetError> {
        let mut report = LoadReport::default();
        let dims: std::collections::HashMap<u64, (u32, u32)> =
            self.images.iter().map(|im| (im.id, (im.width, im.height))).collect();
        let mut kept = Vec::with_capacity(self.annotations.len());
        for mut a in std::mem::take(&mut self.annotations) {
            let &(w, h) = dims.get(&a.image_id).ok_or(DatasetError::DanglingRef {
                annotation_id: a.id,
                image_id: a.image_id,
            })?;
            match a.to_bbox().clamped(w, h) {
                Some(b) => {
                    let clamped = [b.x, b.y, b.w, b.h];
                    if clamped != a.bbox {
                        report.clamped += 1;
                        a.bbox = clamped;
                    }
                    kept.push(a);
                }
                None => report.dropped += 1,
            }
        }
        self.annotations = kept;
        Ok(report)
    }
}

/// Parse annotation JSON and sanitise it, without touching image files.
pub fn parse_dataset(text: &str) -> Result<(Dataset, LoadReport), DatasetError> {
    let mut ds: Dataset =
        serde_json::from_str(text).map_err(|e| DatasetError::Parse(e.to_string()))?;
    let report = ds.sanitize()?;
    Ok((ds, report))
}

pub fn read_annotations(ann_path: &Path) -> Result<(Dataset, LoadReport), DatasetError> {
    let text = fs::read_to_string(ann_path).map_err(|e| DatasetError::io(ann_path, e))?;
    parse_dataset(&text)
}

/// Load annotations and check that every referenced image file exists
/// under `image_root`.
pub fn load_dataset(ann_path: &Path, image_root: &Path) -> Result<(Dataset, LoadReport), DatasetError> {
    let (ds, report) = read_annotations(ann_path)?;
    let mut seen = HashSet::new();
    for im in &ds.images {
        if !seen.insert(im.id) {
            return Err(DatasetError::Parse(format!("duplicate image id {}", im.id)));
        }
        if !image_root.join(&im.file_name).is_file() {
            return Err(DatasetError::MissingImage(im.file_name.clone()));
        }
    }
    if report.clamped + report.dropped > 0 {
        log::warn!(
            "{}: clamped {} boxes, dropped {} empty boxes",
            ann_path.display(),
            report.clamped,
            report.dropped
        );
    }
    Ok((ds, report))
}

pub fn to_json_string(ds: &Dataset) -> String {
    serde_json::to_string_pretty(ds).expect("dataset always serializes")
}

pub fn save_dataset(ds: &Dataset, out_ann_path: &Path) -> Result<(), DatasetError> {
    let mut text = to_json_string(ds);
    text.push('\n');
    fs::write(out_ann_path, text).map_err(|e| DatasetError::io(out_ann_path, e))
}
