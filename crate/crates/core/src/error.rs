use thiserror::Error;

use crate::partitions::Label;

/// Errors raised by the library.
///
/// Variants fall into two groups that callers (notably the CLI) map to
/// different exit codes: resource caps ([`Error::is_resource_cap`]) and
/// everything else, which is an invalid input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} exceeds the configured cap ({requested} > {cap})")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },
    #[error("label {0} is not declared")]
    UnknownLabel(Label),
    #[error("pair ({0}, {1}) joins positions with different letters")]
    KernelViolation(usize, usize),
    #[error("invalid model for label {label}: {reason}")]
    InvalidModel { label: Label, reason: String },
    #[error("label {0} mixes interaction-length parities across the family sweep")]
    MixedParity(Label),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("trace sample has imaginary part {0:e} above tolerance")]
    ImaginaryResidue(f64),
}

impl Error {
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }

    pub(crate) fn cap(what: &'static str, requested: impl Into<u128>, cap: impl Into<u128>) -> Self {
        Error::CapExceeded {
            what,
            requested: requested.into(),
            cap: cap.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
