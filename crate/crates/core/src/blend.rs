/// Convex mix of two 8-bit samples: `round(alpha * top + (1 - alpha) * bottom)`,
/// rounding half away from zero and clamping to `[0, 255]`.
///
/// This is the only rounding rule used for pixel output anywhere in the crate.
#[inline]
pub fn mix_channel(alpha: f64, top: u8, bottom: u8) -> u8 {
    let v = alpha * top as f64 + (1.0 - alpha) * bottom as f64;
    v.round().clamp(0.0, 255.0) as u8
}
