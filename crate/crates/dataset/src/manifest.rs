//! Reproducibility manifest: JSON lines, one header record followed by one
//! record per emitted image.
//!
//! ```text
//! {"record":"header","schema":"bgm-manifest","version":1,"seed":9,"multiplier":2,"config":{...}}
//! {"record":"image","source_file":"a.png","output_file":"a_bgm0.png",...,"mode":"spm","spm_ops":[...],"cpm_ops":[]}
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use bgm_core::{AugConfig, OpLog};
use serde::{Deserialize, Serialize};

use crate::error::DatasetError;

pub const MANIFEST_SCHEMA: &str = "bgm-manifest";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub schema: String,
    pub version: u32,
    pub seed: u64,
    pub multiplier: u32,
    pub config: AugConfig,
}

impl ManifestHeader {
    pub fn new(seed: u64, multiplier: u32, config: AugConfig) -> Self {
        Self {
            schema: MANIFEST_SCHEMA.to_string(),
            version: MANIFEST_VERSION,
            seed,
            multiplier,
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub source_file: String,
    pub output_file: String,
    pub source_image_id: u64,
    pub seed: u64,
    /// RNG stream id of this output.
    pub image_index: u64,
    pub variant: u32,
    #[serde(flatten)]
    pub log: OpLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line {
    Header(ManifestHeader),
    Image(ManifestRecord),
}

/// Append-only manifest writer. Callers serialise access to it.
pub struct ManifestWriter<W: Write> {
    out: W,
}

impl ManifestWriter<BufWriter<File>> {
    pub fn create(path: &Path, header: &ManifestHeader) -> Result<Self, DatasetError> {
        let file = File::create(path).map_err(|e| DatasetError::io(path, e))?;
        Self::new(BufWriter::new(file), header).map_err(|e| DatasetError::io(path, e))
    }
}

impl<W: Write> ManifestWriter<W> {
    pub fn new(mut out: W, header: &ManifestHeader) -> std::io::Result<Self> {
        write_line(&mut out, &Line::Header(header.clone()))?;
        Ok(Self { out })
    }

    pub fn append(&mut self, record: &ManifestRecord) -> std::io::Result<()> {
        write_line(&mut self.out, &Line::Image(record.clone()))
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

fn write_line<W: Write>(out: &mut W, line: &Line) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, line)?;
    out.write_all(b"\n")
}

pub fn read_manifest(path: &Path) -> Result<(ManifestHeader, Vec<ManifestRecord>), DatasetError> {
    let file = File::open(path).map_err(|e| DatasetError::io(path, e))?;
    let mut header = None;
    let mut records = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| DatasetError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line)
            .map_err(|e| DatasetError::Parse(format!("manifest line {}: {e}", n + 1)))?;
        match parsed {
            Line::Header(h) if n == 0 => header = Some(h),
            Line::Header(_) => {
                return Err(DatasetError::Parse(format!("manifest line {}: second header", n + 1)))
            }
            Line::Image(r) => records.push(r),
        }
    }
    let header = header.ok_or_else(|| DatasetError::Parse("manifest has no header".into()))?;
    if header.schema != MANIFEST_SCHEMA || header.version != MANIFEST_VERSION {
        return Err(DatasetError::Parse(format!(
            "unsupported manifest {} v{}",
            header.schema, header.version
        )));
    }
    Ok((header, records))
}
