use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building, loading or validating codes and inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("infeasible code parameters: {0}")]
    Infeasible(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bit {0} is already fixed")]
    AlreadyFixed(usize),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("partition function is zero: no configuration carries positive weight")]
    ZeroPartition,
    #[error(transparent)]
    Contradiction(#[from] Contradiction),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that come from the message-passing dynamics rather
    /// than from bad inputs.
    pub fn is_contradiction(&self) -> bool {
        matches!(self, Error::Contradiction(_))
    }
}

/// A message or pseudomarginal vanished entirely, which means the current
/// decimation state admits no configuration of positive weight.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Contradiction {
    #[error("bit-to-check message {bit}->{check} vanished")]
    BitToCheck { bit: usize, check: usize },
    #[error("check-to-bit message {check}->{bit} vanished")]
    CheckToBit { check: usize, bit: usize },
    #[error("pseudomarginal of bit {bit} vanished")]
    Marginal { bit: usize },
    #[error("round {round}: {cause}")]
    InRound {
        round: usize,
        cause: Box<Contradiction>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
