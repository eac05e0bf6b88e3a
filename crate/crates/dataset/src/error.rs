use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("malformed annotation file: {0}")]
    Parse(String),
    #[error("image file `{0}` not found under the image root")]
    MissingImage(String),
    #[error("annotation {annotation_id} references missing image id {image_id}")]
    DanglingRef { annotation_id: u64, image_id: u64 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: cannot decode image: {message}")]
    Decode { path: PathBuf, message: String },
}

impl DatasetError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
