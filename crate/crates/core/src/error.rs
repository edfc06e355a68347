use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count must be at least 1")]
    EmptyState,
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("window [{start}, {start}+{width}) does not fit in {n} qubits")]
    WindowOutOfBounds { start: usize, width: usize, n: usize },
    #[error("operation width {op} does not match window width {window}")]
    WidthMismatch { op: usize, window: usize },
    #[error("operation width {0} is not supported for local application (max 64)")]
    WidthTooLarge(usize),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("malformed checkpoint: {0}")]
    Parse(String),
    #[error("tableau invariant violated: {0}")]
    Invariant(String),
    #[error("site {site} out of range [{lo}, {hi}]")]
    SiteOutOfRange { site: usize, lo: usize, hi: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("overlapping regions")]
    Overlap,
    #[error("system size {0} is not divisible by 8")]
    Indivisible(usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("optimization failed: {0}")]
    Optimization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
