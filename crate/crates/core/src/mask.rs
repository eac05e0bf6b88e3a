//! Threshold saliency: separates scanned content from the near-white empty
//! belt so SPM never picks blank patches as sources.

use crate::geometry::Rect;
use crate::image::RgbImage;

/// One flag per pixel, `true` for content (non-white) pixels.
///
/// A summed-area table is built alongside the bits so that
/// [`BackgroundMask::content_fraction`] is O(1) per query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackgroundMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
    // (width + 1) x (height + 1) prefix sums of `bits`.
    integral: Vec<u32>,
}

/// Content rule: a pixel is content iff its darkest channel is below
/// `white_threshold`.
#[inline]
pub fn is_content(px: [u8; 3], white_threshold: u32) -> bool {
    (px[0].min(px[1]).min(px[2]) as u32) < white_threshold
}

pub fn compute_mask(img: &RgbImage, white_threshold: u32) -> BackgroundMask {
    let bits: Vec<bool> = img
        .as_raw()
        .chunks_exact(3)
        .map(|px| is_content([px[0], px[1], px[2]], white_threshold))
        .collect();
    BackgroundMask::from_bits(img.width(), img.height(), bits)
}

impl BackgroundMask {
    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width as usize * height as usize);
        let stride = width as usize + 1;
        let mut integral = vec![0u32; stride * (height as usize + 1)];
        for y in 0..height as usize {
            let mut row_sum = 0u32;
            for x in 0..width as usize {
                row_sum += bits[y * width as usize + x] as u32;
                integral[(y + 1) * stride + x + 1] = integral[y * stride + x + 1] + row_sum;
            }
        }
        Self {
            width,
            height,
            bits,
            integral,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> u64 {
        *self.integral.last().unwrap_or(&0) as u64
    }

    /// Number of content pixels inside `r`, which must lie within the mask.
    pub fn count_in(&self, r: &Rect) -> u64 {
        debug_assert!(r.within(self.width, self.height), "{r:?}");
        let stride = self.width as usize + 1;
        let (x0, y0) = (r.x0 as usize, r.y0 as usize);
        let (x1, y1) = (r.x1() as usize, r.y1() as usize);
        let at = |x: usize, y: usize| self.integral[y * stride + x] as i64;
        (at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0)) as u64
    }

    /// Fraction of content pixels inside `r`, in `[0, 1]`.
    pub fn content_fraction(&self, r: &Rect) -> f64 {
        if r.is_empty() {
            return 0.0;
        }
        self.count_in(r) as f64 / r.area() as f64
    }
}

/// Free-function form of [`BackgroundMask::content_fraction`].
pub fn rect_content_fraction(mask: &BackgroundMask, r: &Rect) -> f64 {
    mask.content_fraction(r)
}
