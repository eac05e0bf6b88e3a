//! Dataset plumbing for Background Mixup: COCO-subset annotations,
//! lossless image IO and the per-image reproducibility manifest.

pub mod coco;
pub mod error;
pub mod imageio;
pub mod manifest;

pub use coco::{load_dataset, parse_dataset, read_annotations, save_dataset, Annotation, Category, Dataset, ImageEntry, LoadReport};
pub use error::DatasetError;
pub use imageio::{load_image, save_image};
pub use manifest::{read_manifest, ManifestHeader, ManifestRecord, ManifestWriter};
