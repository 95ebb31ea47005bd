use thiserror::Error;

/// User indices are 1-based in messages (1 = Alice, 2 = Bob).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("corrupted observation at position {index}: received {received}, own input {own}")]
    CorruptedObservation { index: usize, received: u8, own: u8 },

    #[error("contradiction at index {index}: prefix has zero posterior probability")]
    Contradiction { index: usize },

    #[error("unsupported path: {0}")]
    UnsupportedPath(String),

    #[error("too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("negative secrecy rate for user {user}: |I| = {info} < |Rb| = {chained}")]
    NegativeSecrecyRate { user: usize, info: usize, chained: usize },

    #[error("eavesdropper channel not degraded for user {user}: {} violating indices, first {}", .indices.len(), .indices.first().copied().unwrap_or_default())]
    NotDegraded { user: usize, indices: Vec<usize> },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NegativeSecrecyRate { .. } | Error::NotDegraded { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
