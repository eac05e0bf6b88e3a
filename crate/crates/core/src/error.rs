use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field}: range is inverted (lo {lo} > hi {hi})")]
    RangeInverted { field: &'static str, lo: f64, hi: f64 },
    #[error("{field}: value {value} is outside {domain}")]
    OutOfDomain {
        field: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("mode_weights must be non-negative and sum to 1, got {weights:?} (sum {sum})")]
    BadWeights { weights: [f64; 3], sum: f64 },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("pixel buffer has {actual} bytes, expected {expected}")]
    BufferLength { expected: usize, actual: usize },
    #[error("expected a H x W x 3 buffer, got shape {0:?}")]
    Shape(Vec<usize>),
}

/// Errors from the top-level augmentation entry points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AugmentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Image(#[from] ImageError),
}
