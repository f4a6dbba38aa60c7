use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient evaluation failure at zeta = {zeta}")]
    CoefficientEvaluation { zeta: f64 },

    #[error("coefficient evaluation failure at (x, t) = ({x}, {t})")]
    CoefficientEvaluationAt { x: f64, t: f64 },

    #[error("invalid physical parameter {name} = {value}")]
    InvalidPhysicalParameter { name: &'static str, value: f64 },

    #[error("initial temperature negative at x = {x} (value {value})")]
    InitialTemperatureNegative { x: f64, value: f64 },

    #[error("incompatible initial data: {field} has boundary derivative {derivative} at x = {x}")]
    IncompatibleInitialData { field: &'static str, x: f64, derivative: f64 },

    #[error("non-elliptic coefficient {value} at face {face}")]
    NonElliptic { face: usize, value: f64 },

    #[error("scheme breakdown: non-positive pivot {pivot} in row {row}")]
    SchemeBreakdown { row: usize, pivot: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid sequence: M_{index} = {value} is not positive")]
    InvalidSequence { index: usize, value: f64 },

    #[error("MMS source derivation error: {equation} source differs by {difference:e} at (x, t) = ({x}, {t})")]
    MmsSourceDerivation { equation: &'static str, x: f64, t: f64, difference: f64 },

    #[error("unknown MMS case '{0}'")]
    UnknownMmsCase(String),

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
