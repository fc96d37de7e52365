use thiserror::Error;

/// Crate-wide error type. Every variant maps to a stable machine-readable
/// code via [`Error::code`], which front ends surface verbatim.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tolerance:.3e})")]
    NonHermitianInput { defect: f64, tolerance: f64 },

    #[error("block embedding {rows:?} is not a permutation of the 4 basis indices")]
    BadEmbedding { rows: [usize; 4] },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invariant spectrum is degenerate: level spacing {spacing:.3e} below {threshold:.3e}")]
    DegenerateInvariant { spacing: f64, threshold: f64 },

    #[error("eigenframe gauge discontinuity at step {step}: {detail}")]
    GaugeDiscontinuity { step: usize, detail: String },

    #[error("time grids do not match: {detail}")]
    GridMismatch { detail: String },

    #[error("propagator is not unitary: defect {defect:.3e} exceeds {tolerance:.3e}")]
    NonUnitaryPropagator { defect: f64, tolerance: f64 },

    #[error("no sign change found while bracketing a root in [{lo:.6e}, {hi:.6e}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("parameter outside the solvable domain: {detail}")]
    OutOfDomain { detail: String },

    #[error("no cycle count m <= {max_cycles} is commensurate within {tol:.3e}")]
    NoCommensurateCycle { max_cycles: u32, tol: f64 },

    #[error("phase-elimination constraint violated: residual {residual:.3e} exceeds {tolerance:.3e}")]
    ConstraintViolated { residual: f64, tolerance: f64 },

    #[error("gate leaks between invariant blocks: {leakage:.3e} exceeds {tolerance:.3e}")]
    BlockLeakage { leakage: f64, tolerance: f64 },

    #[error("target phase cannot be reached: {detail}")]
    UnreachablePhase { detail: String },

    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
}

impl Error {
    /// Stable identifier for reports and exit-status decisions.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::BadEmbedding { .. } => "BadEmbedding",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DegenerateInvariant { .. } => "DegenerateInvariant",
            Error::GaugeDiscontinuity { .. } => "GaugeDiscontinuity",
            Error::GridMismatch { .. } => "GridMismatch",
            Error::NonUnitaryPropagator { .. } => "NonUnitaryPropagator",
            Error::NoRootInBracket { .. } => "NoRootInBracket",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::NoCommensurateCycle { .. } => "NoCommensurateCycle",
            Error::ConstraintViolated { .. } => "ConstraintViolated",
            Error::BlockLeakage { .. } => "BlockLeakage",
            Error::UnreachablePhase { .. } => "UnreachablePhase",
            Error::InvalidParameter { .. } => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
