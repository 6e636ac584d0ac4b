//! Ingestion: vendor release notes plus a CVE feed in, per-device patch and
//! severity histories out, persisted as an on-disk workspace.

mod dataset;
mod feed;
mod notes;
mod workspace;

pub use dataset::{build_device_dataset, DeviceDataset};
pub use feed::{load_cve_feed, parse_cve_feed, CveFeedEntry};
pub use notes::{parse_release_notes, NoteParserRegistry, ReleaseNote};
pub use workspace::{
    file_digest, load_device_models, load_workspace, save_workspace, DatasetWorkspace,
};

use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unknown release-note parser {0:?}")]
    UnknownParser(String),
    #[error("malformed release-note block at line {line}")]
    MalformedBlock { line: usize },
    #[error("CVE feed schema violation in {field}: {reason}")]
    SchemaError { field: String, reason: String },
    #[error("duplicate CVE id {0} in feed")]
    DuplicateCve(String),
    #[error("duplicate device id {0}")]
    DuplicateDevice(String),
    #[error("unknown device id {0}")]
    UnknownDevice(String),
    #[error("corrupt workspace file {file}: {reason}")]
    CorruptWorkspace { file: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
