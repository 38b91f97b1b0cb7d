use thiserror::Error;

/// Errors produced by ring construction, linear algebra, sheaf assembly and
/// document parsing. Domain misuse (inverting a non-unit, censored-precision
/// overruns, malformed input files) is reported through this type; internal
/// shape/ring mismatches between matrices that the library itself created are
/// programming errors and panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus base {0} is not prime")]
    NotPrime(u64),

    #[error("power-series coefficient field order {0} must be prime")]
    UnsupportedResidueField(u64),

    #[error("prime {0} too large (must fit in 32 bits)")]
    PrimeTooLarge(u64),

    #[error("working precision must satisfy 1 <= m, got {0}")]
    BadPrecision(u32),

    #[error("precision slice {requested} outside 1..={available}")]
    BadSlice { requested: u32, available: u32 },

    #[error("zero has no unit decomposition at working precision")]
    ZeroElement,

    #[error("element with valuation {valuation} is not a unit")]
    NotAUnit { valuation: u32 },

    #[error("rational lift of 0 is undefined")]
    ZeroNumerator,

    #[error("rational with zero denominator")]
    ZeroDenominator,

    #[error("rational {num}/{den} reduces to 0 in the residue field")]
    VanishingRational { num: i64, den: i64 },

    #[error("entry {num}/{den} has negative valuation {kappa} and is not a ring element")]
    NegativeValuation { num: i64, den: i64, kappa: i64 },

    #[error("matrix is not invertible over the ring")]
    NotInvertible,

    #[error("digit index {k} needs precision {needed} but ring has {available}")]
    PrecisionExceeded { k: u32, needed: u32, available: u32 },

    #[error("restriction for vertex {vertex} on edge {edge} has shape {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    RestrictionShape {
        vertex: String,
        edge: String,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },

    #[error("gauge at vertex {vertex} is not invertible")]
    NonUnitGauge { vertex: String },

    #[error("edge {edge}: restriction is not invertible at working precision")]
    SingularRestriction { edge: String },

    #[error("edge {edge}: weight is not a unit (valuation {valuation})")]
    NonUnitWeight { edge: String, valuation: String },

    #[error("operation requires a rank-1 sheaf, found stalk of rank {rank}")]
    NotRankOne { rank: usize },

    #[error("cycle contributions couple: {detail}")]
    NotBlockDecomposable { detail: String },

    #[error("vector is not a cocycle mod pi")]
    NotACocycle,

    #[error("matrices must share shape: {a_rows}x{a_cols} vs {b_rows}x{b_cols}")]
    ShapeMismatch {
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },

    #[error("matrices must share a ring: {a} vs {b}")]
    RingMismatch { a: String, b: String },

    #[error("edge transform {index} must be {rank}x{rank}, got {rows}x{cols}")]
    TransformShape {
        index: usize,
        rank: usize,
        rows: usize,
        cols: usize,
    },

    #[error("detection bit width {bits} outside 1..={precision}")]
    BadBitWidth { bits: u32, precision: u32 },

    #[error("consensus network needs one ratio per edge: {edges} edges, {ratios} ratios")]
    RatioCount { edges: usize, ratios: usize },

    #[error("invalid document: {0}")]
    Validation(String),

    #[error("failed to parse document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
