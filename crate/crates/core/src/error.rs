use alloc::string::String;

use crate::data::IdxError;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("sample {index} from device {device} is already in the server buffer")]
    DuplicateSample { device: usize, index: usize },

    #[error("aggregation has no participating samples")]
    NoParticipants,

    #[error("mode {mode} cannot run on this population: {reason}")]
    ModeMismatch { mode: &'static str, reason: String },

    #[error(transparent)]
    Idx(#[from] IdxError),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
