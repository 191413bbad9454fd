use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{rows}x{cols} is not divisible by {divisor} in both axes")]
    NotDivisible {
        rows: usize,
        cols: usize,
        divisor: usize,
    },
    #[error("too many levels: {levels} levels would shrink a {rows}x{cols} input below 2x2")]
    TooManyLevels {
        levels: usize,
        rows: usize,
        cols: usize,
    },
    #[error("directional filter bank depth {0} is outside the supported range 0..=4")]
    UnsupportedDepth(usize),
    #[error("band of {rows}x{cols} cannot be split by a depth-{depth} directional filter bank")]
    IncompatibleDfbShape {
        rows: usize,
        cols: usize,
        depth: usize,
    },
    #[error("expected a square band, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("structure mismatch: {0}")]
    Structure(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("watermark of {bits} bits exceeds the lowpass capacity of {capacity} coefficients")]
    Capacity { bits: usize, capacity: usize },
    #[error("invalid attack specification: {0}")]
    InvalidAttack(String),
    #[error("band value {0} is not an integer")]
    NonInteger(f64),
    #[error("empty input")]
    Empty,
    #[error("compressed size must be positive")]
    ZeroBits,
}
