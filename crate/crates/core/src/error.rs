use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("distance undefined for a design with fewer than two runs")]
    TooFewRuns,

    #[error("column {column} is not a permutation of 1..={levels}")]
    NotLatinHypercube { column: usize, levels: usize },

    #[error("row {row} is not a permutation of 1..={components}")]
    NotSequence { row: usize, components: usize },

    #[error("not a Latin square: {0}")]
    NotLatinSquare(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("zero variance in column {0}")]
    ZeroVariance(usize),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("residue {value} out of range for modulus {modulus}")]
    OutOfRange { value: u64, modulus: u64 },

    #[error("last row of the shifted design is not constant")]
    NonConstantLastRow,

    #[error("recorded deleted level {recorded} disagrees with last row value {found}")]
    DeletedLevelMismatch { recorded: u64, found: u64 },

    #[error("equidistant construction inapplicable for m = {m}: {reason}")]
    EquidistantInapplicable { m: usize, reason: String },

    #[error("no modulus N with phi(N) = {}", 2 * .0)]
    NoTotientModulus(usize),

    #[error("n = {n} must be a multiple of m = {m}")]
    NotMultiple { n: usize, m: usize },

    #[error("unsupported size: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
