//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Input problems (bad
//! resolutions, mismatched grids, malformed files) are distinguished from
//! degenerate-but-legal situations (e.g. an identically zero symbol), so the
//! CLI can map them to distinct exit codes.

use crate::dyadic::MAX_RESOLUTION;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("resolution {0} outside supported range 1..={MAX_RESOLUTION}")]
    InvalidResolution(u32),

    #[error("dyadic index {index} out of range at level {level}")]
    InvalidIndex { level: u32, index: u64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("subgrid region: {0}")]
    SubgridRegion(String),

    #[error("value count {got} does not match the {want} grid cells")]
    LengthMismatch { got: usize, want: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate rectangle in family: {0}")]
    DuplicateRectangle(String),

    #[error("family not contracting: {0}")]
    NotContracting(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
