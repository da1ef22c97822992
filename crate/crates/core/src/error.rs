use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid dimensions {rows}x{cols} with palette {palette}")]
    InvalidDimensions {
        rows: usize,
        cols: usize,
        palette: usize,
    },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },

    #[error("colour {colour} outside palette [1, {palette}]")]
    ColourOutOfRange { colour: usize, palette: usize },

    #[error("cell ({row}, {col}) outside a {rows}x{cols} matrix")]
    CellOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not proper: colour {colour} repeats in {line}")]
    Improper { colour: usize, line: String },

    #[error("matrix not total")]
    NotTotal,

    #[error("line indices must differ (got {0} twice)")]
    EqualIndices(usize),

    #[error("colour {colour} has frequency {frequency}, expected a 2-colour")]
    NotTwoColour { colour: usize, frequency: usize },

    #[error("operation is scoped to instance {expected:?}, got {found:?}")]
    WrongInstance {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },

    #[error("{what}: {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("too large for exact canonicalization: {cells} cells exceeds cap {cap}")]
    TooLarge { cells: usize, cap: usize },

    #[error("matrix is not a complete proper colouring: {0}")]
    NotInFamily(String),

    #[error("no valid extra column exists")]
    NoExtension,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}
