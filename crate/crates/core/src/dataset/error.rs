use thiserror::Error;

use crate::encoding::EncodingError;
use crate::fea::FeaError;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("geometry generation failed: {0}")]
    Generation(String),
    #[error("format error at byte {offset}{}: {reason}", record.map(|r| format!(" (record {r})")).unwrap_or_default())]
    Format {
        offset: u64,
        record: Option<u64>,
        reason: String,
    },
    #[error("unsupported format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("split {name:?} already exists with different content")]
    SplitConflict { name: String },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Fea(#[from] FeaError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DatasetError>;
