//! Configuration files, snapshots, CSV/JSON export and the run driver
//! behind the command-line tool.

mod config;
mod driver;
mod export;
mod snapshot;

pub use config::{
    parse_spec, serialize_spec, DispersionSection, DynamicsSection, InitialKind, InitialSection,
    IterateSection, LatticeSection, LemmaSuiteSection, LinearizedModeName, ModeSpec, OutputFormat,
    OutputSection, RefineSection, SimulationSpec, System,
};
pub use driver::{run, Command, RunOptions, RunOutcome, OUTPUT_DIR_ENV};
pub use export::{format_float, write_json, write_series_csv, write_table_csv, Manifest};
pub use snapshot::{
    export_snapshot, load_snapshot, load_snapshot_into, read_snapshot, snapshot_bytes, Snapshot,
    StateKind, SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};

use crate::error::WaveError;
use thiserror::Error;

/// Failures of the configuration, snapshot and driver layer.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        message: String,
    },

    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("snapshot format version {found}, expected {expected}")]
    FormatVersionMismatch { found: u32, expected: u32 },

    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Wave(#[from] WaveError),
}

impl IoError {
    pub(crate) fn validation(field: &str, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Process exit status for this failure.
    ///
    /// | code | meaning |
    /// |------|---------|
    /// | 0 | success |
    /// | 1 | file system or snapshot failure |
    /// | 2 | parse or validation failure |
    /// | 3 | surface degenerate |
    /// | 4 | non-finite values |
    /// | 5 | iteration did not contract |
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Validation { .. } => 2,
            Self::Io(_) | Self::FormatVersionMismatch { .. } | Self::CorruptSnapshot(_) => 1,
            Self::Wave(e) => wave_exit_code(e),
        }
    }
}

pub(crate) fn wave_exit_code(e: &WaveError) -> i32 {
    match e {
        WaveError::SurfaceDegenerate { .. } => 3,
        WaveError::NonFinite { .. } => 4,
        WaveError::NonContraction { .. } => 5,
        WaveError::RationalDependence { .. }
        | WaveError::InvalidArgument(_)
        | WaveError::LatticeMismatch => 2,
    }
}

pub type IoResult<T> = std::result::Result<T, IoError>;
