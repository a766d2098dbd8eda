use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("base {0} is composite; the construction requires a prime base")]
    CompositeBase(u64),

    #[error("base {0} is outside the supported range 2..=256")]
    UnsupportedBase(u64),

    #[error("matrix dimension {requested} exceeds the capacity limit {limit}")]
    Capacity { requested: u128, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("codeword lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("symbol {symbol} is out of range for base {base}")]
    SymbolOutOfRange { symbol: u32, base: u32 },

    #[error("matrix needs at least 2 rows and 2 columns, got {rows}x{cols}")]
    DegenerateDimensions { rows: usize, cols: usize },

    #[error("requested {rows}x{cols} exceeds source {src_rows}x{src_cols}")]
    TruncationTooLarge {
        rows: usize,
        cols: usize,
        src_rows: usize,
        src_cols: usize,
    },

    #[error("cannot make {rows} rows distinct with {cols} columns over base {base}")]
    Unrepairable { rows: usize, cols: usize, base: u32 },

    #[error("base {base} does not divide codeword length {len}")]
    MultiplicityLength { base: u32, len: usize },

    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("class count mismatch: dataset has {dataset} classes, codebook has {codebook} rows")]
    ClassCountMismatch { dataset: usize, codebook: usize },

    #[error("codebook rows {0} and {1} are identical")]
    DuplicateCodewords(usize, usize),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("class {class} has {size} samples, fewer than {folds} folds")]
    Stratification {
        class: usize,
        size: usize,
        folds: usize,
    },

    #[error("{path}: {source}")]
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

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
