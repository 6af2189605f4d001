use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("axis frames differ: {0} vs {1}")]
    FrameMismatch(String, String),

    #[error("invalid axis frame: fine exponent {fine} exceeds coarse exponent {coarse}")]
    InvalidFrame { fine: i64, coarse: i64 },

    #[error("axis frame spans 2^{span} cells, more than a cell index can address")]
    FrameTooLarge { span: i64 },

    #[error("run [{start}, {end}) is empty or outside 0..{cell_count}")]
    InvalidRun { start: u64, end: u64, cell_count: u64 },

    #[error("component set is empty")]
    EmptyComponents,

    #[error("run [{start}, {end}) does not have a power-of-two length")]
    RunNotDyadic { start: u64, end: u64 },

    #[error("piece exponent {piece_exp} is not below run exponent {run_exp}")]
    PieceNotFiner { piece_exp: i64, run_exp: i64 },

    #[error("piece exponent {piece_exp} is below the frame resolution {fine_exp}")]
    BelowResolution { piece_exp: i64, fine_exp: i64 },

    #[error("scale sequence must be strictly increasing: {0:?}")]
    NonIncreasingScales(Vec<i64>),

    #[error("scale sequence needs at least two entries (k >= 1), got {0}")]
    TooFewScales(usize),

    #[error("compositions need 1 <= n <= k, got n = {n}, k = {k}")]
    CompositionRange { n: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tuple {tuple:?} has an entry outside 0..={k}")]
    TupleOutOfRange { tuple: Vec<usize>, k: usize },

    #[error("insufficient spaced points on axis {axis}: need {needed} points spaced more than {spacing}, window holds {found}")]
    InsufficientSpacedPoints {
        axis: usize,
        needed: usize,
        spacing: u64,
        found: usize,
    },

    #[error("axis {axis} has no spectrum sections inside the window")]
    NoSections { axis: usize },

    #[error("extracted sequences leave tuple {0:?} unrealized")]
    RealizationFailed(Vec<usize>),

    #[error("side length must be positive")]
    NonPositiveLength,

    #[error("grid of {cells} cells exceeds the guard of {guard}")]
    GuardExceeded { cells: u128, guard: u64 },

    #[error("window exponent {t} outside [{fine}, {coarse}]")]
    WindowExponent { t: i64, fine: i64, coarse: i64 },

    #[error("shape {shape:?} outside the frame range of its axis")]
    ShapeOutOfRange { shape: Vec<i64> },

    #[error("no shape supplied for tuple {0:?}")]
    MissingShape(Vec<usize>),

    #[error("alpha must lie strictly between 0 and 1")]
    AlphaOutOfRange,

    #[error("lattice of {0} points is too large for the downward-closure sum")]
    LatticeTooLarge(u128),

    #[error("window holds up to {0} spectrum tuples, more than the enumeration limit")]
    SpectrumTooLarge(u128),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid spectrum family: {0}")]
    InvalidFamily(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
