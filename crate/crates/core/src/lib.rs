//! Background Mixup (BGM) augmentation for X-ray security imagery.
//!
//! Two patch-level operations simulate cluttered baggage backgrounds
//! without touching labels:
//!
//! - **SPM** (self patch mixup) copies background patches that avoid every
//!   ground-truth box, moves them and alpha-blends them back in.
//! - **CPM** (color patch mixup) lays semi-transparent random-color
//!   rectangles over the image.
//!
//! [`background_mixup`] gates on a probability and then runs SPM, CPM or
//! SPM followed by CPM. All randomness comes from a keyed [`SeededRng`], so
//! outputs are reproducible bit for bit; [`reference`] holds a naive
//! implementation the optimized path is checked against.

pub mod blend;
pub mod buffer;
pub mod config;
pub mod cpm;
pub mod error;
pub mod geometry;
pub mod image;
pub mod mask;
pub mod pipeline;
pub mod reference;
pub mod rng;
pub mod spm;
pub mod verify;

pub use config::{validate_config, AugConfig, ClosedRange};
pub use error::{AugmentError, ConfigError, ImageError};
pub use geometry::{clip_rect, BBox, Rect};
pub use image::RgbImage;
pub use mask::{compute_mask, rect_content_fraction, BackgroundMask};
pub use pipeline::{background_mixup, choose_mode, derive_image_rng, AugResult, Mode, OpLog};
pub use rng::{RandomSource, SeededRng};
