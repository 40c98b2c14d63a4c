use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown dataset category `{0}` (expected ANTI, CORR or INDE)")]
    UnknownCategory(String),
    #[error("dataset must have at least one tuple and one dimension (got N={n}, d={d})")]
    EmptyShape { n: usize, d: usize },
    #[error("attribute width {0} is outside 1..=32 bits")]
    AttributeWidth(u32),
    #[error("utility width {0} is outside 1..=63 bits")]
    UtilityWidth(u32),
    #[error("tuple has {got} attributes, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("attribute value {value} does not fit in {bits} bits")]
    AttributeOverflow { value: u64, bits: u32 },
    #[error("invalid utility weights: {0}")]
    InvalidWeights(String),
    #[error("cannot parse utility expression: {0}")]
    Expression(String),
    #[error("no columns selected")]
    EmptySelection,
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),
    #[error("non-numeric value `{value}` in column `{column}` at row {row}")]
    NonNumeric { column: String, row: usize, value: String },
    #[error("CSV file {0} has no data rows")]
    NoRows(PathBuf),
    #[error("address {addr} out of range for QRAM of {len} cells")]
    AddressOutOfRange { addr: usize, len: usize },
    #[error("no active indices to search over")]
    EmptyActiveSet,
    #[error("gate backend needs {needed} qubits, budget is {budget}")]
    QubitBudget { needed: u32, budget: u32 },
    #[error("cannot measure an empty superposition")]
    EmptyHandle,
    #[error("k={k} is outside 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("rank {rank} is outside 1..={n}")]
    InvalidRank { rank: usize, n: usize },
    #[error("priority queue is full (capacity {0})")]
    QueueFull(usize),
    #[error("invalid IO policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("nothing to emit: result set is empty")]
    EmptyResults,
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
