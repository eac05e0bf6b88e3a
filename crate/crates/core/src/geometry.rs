//! Integer patch rectangles and ground-truth boxes.

use serde::{Deserialize, Serialize};

/// Half-open integer rectangle `[x0, x0 + w) × [y0, y0 + h)`.
///
/// The origin is signed so that a moved patch can be described before it is
/// clipped back into the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub const fn new(x0: i64, y0: i64, w: u32, h: u32) -> Self {
        Self { x0, y0, w, h }
    }

    pub fn x1(&self) -> i64 {
        self.x0 + self.w as i64
    }

    pub fn y1(&self) -> i64 {
        self.y0 + self.h as i64
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    /// True when `self` lies inside `[0, width) × [0, height)`.
    pub fn within(&self, width: u32, height: u32) -> bool {
        self.x0 >= 0 && self.y0 >= 0 && self.x1() <= width as i64 && self.y1() <= height as i64
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.y0 >= self.y0 && other.x1() <= self.x1() && other.y1() <= self.y1()
    }

    /// Open-interval overlap test against a (possibly fractional) box.
    /// Rects that only share an edge do not intersect.
    pub fn intersects_box(&self, b: &BBox) -> bool {
        (self.x0 as f64) < b.x + b.w
            && b.x < self.x1() as f64
            && (self.y0 as f64) < b.y + b.h
            && b.y < self.y1() as f64
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Rect {
        Rect::new(self.x0 + dx, self.y0 + dy, self.w, self.h)
    }
}

/// Axis-aligned ground-truth box in pixel coordinates, COCO `[x, y, w, h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub category_id: i64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64, category_id: i64) -> Self {
        Self { x, y, w, h, category_id }
    }

    /// Clamp to `[0, width] × [0, height]`. Returns `None` when nothing of
    /// positive area remains.
    pub fn clamped(&self, width: u32, height: u32) -> Option<BBox> {
        let (width, height) = (width as f64, height as f64);
        let inside = self.x >= 0.0
            && self.y >= 0.0
            && self.x + self.w <= width
            && self.y + self.h <= height;
        if inside && self.w > 0.0 && self.h > 0.0 {
            return Some(*self);
        }
        let x0 = self.x.clamp(0.0, width);
        let y0 = self.y.clamp(0.0, height);
        let x1 = (self.x + self.w).clamp(0.0, width);
        let y1 = (self.y + self.h).clamp(0.0, height);
        if x1 > x0 && y1 > y0 {
            Some(BBox::new(x0, y0, x1 - x0, y1 - y0, self.category_id))
        } else {
            None
        }
    }
}

/// Intersection of `r` with the image rectangle `[0, width) × [0, height)`,
/// or `None` when that intersection is empty.
pub fn clip_rect(r: Rect, width: u32, height: u32) -> Option<Rect> {
    let x0 = r.x0.max(0);
    let y0 = r.y0.max(0);
    let x1 = r.x1().min(width as i64);
    let y1 = r.y1().min(height as i64);
    if x1 <= x0 || y1 <= y0 {
        return None;
    }
    Some(Rect::new(x0, y0, (x1 - x0) as u32, (y1 - y0) as u32))
}
