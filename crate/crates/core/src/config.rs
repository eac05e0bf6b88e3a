//! Augmentation hyperparameters and their validation.
//!
//! The config is a flat key-value table. On disk it is TOML, with ranges
//! written as two-element arrays:
//!
//! ```toml
//! apply_probability = 0.5
//! spm_patch_count = [1, 3]
//! spm_alpha = [0.3, 0.5]
//! mode_weights = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]
//! ```
//!
//! Missing keys fall back to [`AugConfig::default`]; unknown keys are
//! rejected.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::rng::RandomSource;

/// Inclusive interval `[lo, hi]`, serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
pub struct ClosedRange<T: Copy> {
    pub lo: T,
    pub hi: T,
}

impl<T: Copy> ClosedRange<T> {
    pub const fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }
}

impl<T: Copy> From<[T; 2]> for ClosedRange<T> {
    fn from([lo, hi]: [T; 2]) -> Self {
        Self { lo, hi }
    }
}

impl<T: Copy> From<ClosedRange<T>> for [T; 2] {
    fn from(r: ClosedRange<T>) -> Self {
        [r.lo, r.hi]
    }
}

impl ClosedRange<f64> {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// One uniform draw. Consumes exactly one `u64`.
    pub fn sample<R: RandomSource>(&self, rng: &mut R) -> f64 {
        rng.real_in(self.lo, self.hi)
    }
}

impl ClosedRange<u32> {
    pub fn contains(&self, v: u32) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn sample<R: RandomSource>(&self, rng: &mut R) -> u32 {
        rng.int_in(self.lo as i64, self.hi as i64) as u32
    }
}

/// All Background Mixup hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugConfig {
    /// Probability that an image is augmented at all.
    pub apply_probability: f64,
    pub spm_patch_count: ClosedRange<u32>,
    pub cpm_patch_count: ClosedRange<u32>,
    pub spm_alpha: ClosedRange<f64>,
    pub cpm_alpha: ClosedRange<f64>,
    /// Per-axis fraction of the image width/height used for SPM patch sides.
    pub spm_area_ratio: ClosedRange<f64>,
    pub cpm_area_ratio: ClosedRange<f64>,
    /// Pixels whose darkest channel is at or above this value count as
    /// empty background.
    pub white_threshold: u32,
    /// Minimum fraction of content pixels in an SPM source patch.
    pub min_background_fraction: f64,
    /// Rejection-sampling attempts per SPM patch.
    pub max_sample_attempts: u32,
    /// Weights of {SPM, CPM, SPM+CPM}.
    pub mode_weights: [f64; 3],
}

impl Default for AugConfig {
    fn default() -> Self {
        Self {
            apply_probability: 0.5,
            spm_patch_count: ClosedRange::new(1, 3),
            cpm_patch_count: ClosedRange::new(1, 3),
            spm_alpha: ClosedRange::new(0.3, 0.5),
            cpm_alpha: ClosedRange::new(0.5, 0.7),
            spm_area_ratio: ClosedRange::new(0.1, 0.4),
            cpm_area_ratio: ClosedRange::new(0.05, 0.2),
            white_threshold: 240,
            min_background_fraction: 0.5,
            max_sample_attempts: 50,
            mode_weights: [1.0 / 3.0, 1.0 / 3.0, 1.0 - 2.0 / 3.0],
        }
    }
}

pub const WEIGHT_TOLERANCE: f64 = 1e-9;

fn check_unit(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ConfigError::OutOfDomain {
            field,
            value: v,
            domain: "[0, 1]",
        })
    }
}

fn check_range(
    field: &'static str,
    r: &ClosedRange<f64>,
    zero_open: bool,
) -> Result<(), ConfigError> {
    if r.lo.is_nan() || r.hi.is_nan() {
        return Err(ConfigError::OutOfDomain {
            field,
            value: f64::NAN,
            domain: "finite reals",
        });
    }
    if r.lo > r.hi {
        return Err(ConfigError::RangeInverted {
            field,
            lo: r.lo,
            hi: r.hi,
        });
    }
    if zero_open {
        if r.lo <= 0.0 || r.hi > 1.0 {
            let value = if r.lo <= 0.0 { r.lo } else { r.hi };
            return Err(ConfigError::OutOfDomain {
                field,
                value,
                domain: "(0, 1]",
            });
        }
        Ok(())
    } else {
        check_unit(field, r.lo)?;
        check_unit(field, r.hi)
    }
}

fn check_count(field: &'static str, r: &ClosedRange<u32>) -> Result<(), ConfigError> {
    if r.lo > r.hi {
        return Err(ConfigError::RangeInverted {
            field,
            lo: r.lo as f64,
            hi: r.hi as f64,
        });
    }
    Ok(())
}

/// Returns the config unchanged iff every invariant holds.
pub fn validate_config(cfg: &AugConfig) -> Result<AugConfig, ConfigError> {
    check_unit("apply_probability", cfg.apply_probability)?;
    check_count("spm_patch_count", &cfg.spm_patch_count)?;
    check_count("cpm_patch_count", &cfg.cpm_patch_count)?;
    check_range("spm_alpha", &cfg.spm_alpha, false)?;
    check_range("cpm_alpha", &cfg.cpm_alpha, false)?;
    check_range("spm_area_ratio", &cfg.spm_area_ratio, true)?;
    check_range("cpm_area_ratio", &cfg.cpm_area_ratio, true)?;
    if cfg.white_threshold > 255 {
        return Err(ConfigError::OutOfDomain {
            field: "white_threshold",
            value: cfg.white_threshold as f64,
            domain: "[0, 255]",
        });
    }
    check_unit("min_background_fraction", cfg.min_background_fraction)?;
    if cfg.max_sample_attempts == 0 {
        return Err(ConfigError::OutOfDomain {
            field: "max_sample_attempts",
            value: 0.0,
            domain: "positive integers",
        });
    }
    let w = cfg.mode_weights;
    let sum: f64 = w.iter().sum();
    let all_valid = w.iter().all(|v| v.is_finite() && *v >= 0.0);
    if !all_valid || (sum - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(ConfigError::BadWeights { weights: w, sum });
    }
    Ok(cfg.clone())
}

impl AugConfig {
    pub fn validate(&self) -> Result<AugConfig, ConfigError> {
        validate_config(self)
    }

    /// Parse a TOML document. Does not validate.
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Build from a key-value mapping such as a JSON object.
    pub fn from_json_value(v: serde_json::Value) -> Result<Self, ConfigError> {
        serde_json::from_value(v).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config always serializes")
    }

    /// Override one key with a TOML-syntax value, e.g.
    /// `set("spm_alpha", "[0.2, 0.4]")`.
    pub fn set(&mut self, key: &str, raw_value: &str) -> Result<(), ConfigError> {
        let mut table = toml::Table::try_from(&*self).expect("config always serializes");
        if !table.contains_key(key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        let parsed: toml::Table = format!("v = {raw_value}")
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(format!("{key}: {e}")))?;
        table.insert(key.to_string(), parsed["v"].clone());
        *self = table
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(format!("{key}: {e}")))?;
        Ok(())
    }
}
