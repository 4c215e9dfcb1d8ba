use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("NonHermitian: max |A - A^H| = {deviation:e}")]
    NonHermitian { deviation: f64 },

    #[error("NotPSD: minimum eigenvalue {min_eigenvalue}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("TraceNotOne: trace is {trace}")]
    TraceNotOne { trace: f64 },

    #[error("EffectOutOfRange: eigenvalues span [{min_eigenvalue}, {max_eigenvalue}]")]
    EffectOutOfRange { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("IncompletePOM: max |sum of effects - 1| = {deviation:e}")]
    IncompletePom { deviation: f64 },

    #[error("POM must have at least one effect")]
    EmptyPom,

    #[error("DimensionMismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("IndexOutOfRange: index {index} but only {len} outcomes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("BadLetter: letter {letter} not in alphabet 1..={alphabet_size}")]
    BadLetter { letter: u32, alphabet_size: usize },

    #[error("ResourceLimit: {what} needs {requested}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("AlphabetTooLarge: alphabet size {size} exceeds cap {cap}")]
    AlphabetTooLarge { size: usize, cap: usize },

    #[error("InvalidDistribution: {0}")]
    InvalidDistribution(String),

    #[error("NonRationalInput: {0}")]
    NonRationalInput(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("SizeMismatch: {0}")]
    SizeMismatch(String),

    #[error("EmptyGoodSet: no input word clears the success threshold")]
    EmptyGoodSet,

    #[error("PrerequisiteNotVerified: {0}")]
    PrerequisiteNotVerified(String),

    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),

    #[error("Format: {0}")]
    Format(String),
}

impl Error {
    /// Short machine-readable name, used in reports and exit-code mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NonHermitian { .. } => "NonHermitian",
            Error::NotPsd { .. } => "NotPSD",
            Error::TraceNotOne { .. } => "TraceNotOne",
            Error::EffectOutOfRange { .. } => "EffectOutOfRange",
            Error::IncompletePom { .. } => "IncompletePOM",
            Error::EmptyPom => "EmptyPOM",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::BadLetter { .. } => "BadLetter",
            Error::ResourceLimit { .. } => "ResourceLimit",
            Error::AlphabetTooLarge { .. } => "AlphabetTooLarge",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::NonRationalInput(_) => "NonRationalInput",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::SizeMismatch(_) => "SizeMismatch",
            Error::EmptyGoodSet => "EmptyGoodSet",
            Error::PrerequisiteNotVerified(_) => "PrerequisiteNotVerified",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::Format(_) => "Format",
        }
    }
}
