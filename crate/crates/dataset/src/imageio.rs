//! Raster IO. Any format the decoder understands can be read; output is
//! always PNG so augmented pixels survive re-encoding exactly.
//!
//! 16-bit inputs are reduced to 8 bits by keeping the high byte of each
//! sample. Alpha channels are dropped; grayscale is replicated to R=G=B.

use std::path::Path;

use bgm_core::RgbImage;
use image::{DynamicImage, ExtendedColorType, ImageFormat, ImageReader};

use crate::error::DatasetError;

fn high_bytes(samples: &[u16], channels: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() / channels * 3);
    for px in samples.chunks_exact(channels) {
        match channels {
            1 | 2 => {
                let v = (px[0] >> 8) as u8;
                out.extend_from_slice(&[v, v, v]);
            }
            _ => out.extend(px[..3].iter().map(|s| (s >> 8) as u8)),
        }
    }
    out
}

fn to_rgb(img: DynamicImage, path: &Path) -> Result<RgbImage, DatasetError> {
    let (w, h) = (img.width(), img.height());
    let data = match &img {
        DynamicImage::ImageLuma16(b) => Some(high_bytes(b.as_raw(), 1)),
        DynamicImage::ImageLumaA16(b) => Some(high_bytes(b.as_raw(), 2)),
        DynamicImage::ImageRgb16(b) => Some(high_bytes(b.as_raw(), 3)),
        DynamicImage::ImageRgba16(b) => Some(high_bytes(b.as_raw(), 4)),
        _ => None,
    };
    let data = match data {
        Some(d) => {
            log::warn!("{}: 16-bit image reduced to 8 bits", path.display());
            d
        }
        None => img.into_rgb8().into_raw(),
    };
    RgbImage::from_raw(w, h, data).map_err(|e| DatasetError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_image(path: &Path) -> Result<RgbImage, DatasetError> {
    let reader = ImageReader::open(path)
        .map_err(|e| DatasetError::io(path, e))?
        .with_guessed_format()
        .map_err(|e| DatasetError::io(path, e))?;
    let decoded = reader.decode().map_err(|e| DatasetError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    to_rgb(decoded, path)
}

/// Write `img` as PNG, regardless of the extension of `path`.
pub fn save_image(img: &RgbImage, path: &Path) -> Result<(), DatasetError> {
    image::save_buffer_with_format(
        path,
        img.as_raw(),
        img.width(),
        img.height(),
        ExtendedColorType::Rgb8,
        ImageFormat::Png,
    )
    .map_err(|e| match e {
        image::ImageError::IoError(io) => DatasetError::io(path, io),
        other => DatasetError::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{ImageBuffer, Luma, Rgb, Rgba};

    #[test]
    fn png_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        let mut state = 17u32;
        let img = RgbImage::from_fn(32, 32, |_, _| {
            state = state.wrapping_mul(1664525).wrapping_add(1013904223);
            let b = state.to_le_bytes();
            [b[1], b[2], b[3]]
        })
        .unwrap();
        save_image(&img, &path).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);
    }

    #[test]
    fn grayscale_is_replicated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        let gray: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_fn(4, 3, |x, y| Luma([(x * 10 + y) as u8]));
        gray.save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.pixel(3, 2), [32, 32, 32]);
    }

    #[test]
    fn sixteen_bit_keeps_high_byte() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.png");
        let wide: ImageBuffer<Rgb<u16>, Vec<u16>> =
            ImageBuffer::from_fn(2, 2, |x, _| Rgb([0x12FF, 0xAB01, if x == 0 { 0xFFFF } else { 0x00FF }]));
        wide.save(&path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.pixel(0, 0), [0x12, 0xAB, 0xFF]);
        assert_eq!(img.pixel(1, 1), [0x12, 0xAB, 0x00]);
    }

    #[test]
    fn alpha_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.png");
        let rgba: ImageBuffer<Rgba<u8>, Vec<u8>> = ImageBuffer::from_pixel(3, 3, Rgba([9, 8, 7, 0]));
        rgba.save(&path).unwrap();
        assert_eq!(load_image(&path).unwrap().pixel(1, 1), [9, 8, 7]);
    }

    #[test]
    fn undecodable_and_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.png");
        std::fs::write(&path, b"not an image").unwrap();
        assert!(matches!(load_image(&path), Err(DatasetError::Decode { .. })));
        assert!(matches!(
            load_image(&dir.path().join("absent.png")),
            Err(DatasetError::Io { .. })
        ));
    }
}
