use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not normalized: sum={sum}")]
    NotNormalized { sum: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("alphabet must be non-empty")]
    EmptyAlphabet,

    #[error("duplicate alphabet label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("erasure probability {0} outside [0, 1]")]
    EpsilonOutOfRange(f64),

    #[error("{name}={value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("invalid Renyi order {0}")]
    InvalidAlpha(f64),

    #[error("degenerate witness: max weight is zero")]
    DegenerateWitness,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("alphabet too large for path enumeration: min(|X|,|Y|)={size} > {limit}; use the LP route")]
    AlphabetTooLarge { size: usize, limit: usize },

    #[error("source does not have an erasure eavesdropper")]
    NotErasureSource,

    #[error("enumeration of {states} states exceeds the limit {limit}")]
    EnumerationTooLarge { states: u128, limit: u128 },

    #[error("set is empty")]
    EmptySet,

    #[error("sets are not disjoint")]
    SetsNotDisjoint,

    #[error("string length {got} does not match block length {expected}")]
    StringLength { expected: usize, got: usize },

    #[error("swap symbols must differ per coordinate (x1 != x2, y1 != y2)")]
    PairsCollide,

    #[error("block length must be even and positive, got {0}")]
    InvalidBlockLength(usize),

    #[error("selected symbols have zero acceptance probability")]
    ZeroAcceptance,

    #[error("blocks must be at least 1")]
    NoBlocks,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors raised by an explicit computational guard rather than
    /// by invalid input.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::AlphabetTooLarge { .. } | Error::EnumerationTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
