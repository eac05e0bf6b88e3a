//! Array-level entry points for host-language bindings.
//!
//! Bindings hand over a contiguous `H x W x 3` byte buffer, boxes as
//! `[x, y, w, h]` and the config as a key-value mapping. Only the pipeline
//! entry point and config helpers are exposed here.

use crate::config::{validate_config, AugConfig};
use crate::error::{AugmentError, ImageError};
use crate::geometry::BBox;
use crate::image::RgbImage;
use crate::pipeline::{background_mixup, derive_image_rng, OpLog};

/// The default config as a JSON object.
pub fn default_config() -> serde_json::Value {
    AugConfig::default().to_json_value()
}

/// Augment a row-major RGB buffer of the given `shape` (`[H, W, 3]`).
///
/// The input is never modified; a new buffer of the same shape is returned.
/// Boxes carry no category (recorded as 0), since SPM only needs geometry.
pub fn augment_array(
    pixels: &[u8],
    shape: &[usize],
    boxes: &[[f64; 4]],
    config: &serde_json::Value,
    seed: u64,
    image_index: u64,
) -> Result<(Vec<u8>, OpLog), AugmentError> {
    let &[h, w, 3] = shape else {
        return Err(ImageError::Shape(shape.to_vec()).into());
    };
    let (Ok(width), Ok(height)) = (u32::try_from(w), u32::try_from(h)) else {
        return Err(ImageError::Shape(shape.to_vec()).into());
    };
    let cfg = validate_config(&AugConfig::from_json_value(config.clone())?)?;
    let img = RgbImage::from_raw(width, height, pixels.to_vec())?;
    let gt: Vec<BBox> = boxes
        .iter()
        .map(|b| BBox::new(b[0], b[1], b[2], b[3], 0))
        .collect();
    let mut rng = derive_image_rng(seed, image_index);
    let result = background_mixup(&img, &gt, &cfg, &mut rng)?;
    Ok((result.image.into_raw(), result.log))
}
