use thiserror::Error;

/// Everything that can go wrong across the kernel, the analyses and the
/// synthesis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular at the configured tolerance")]
    SingularMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(
        "determinant interpolation residual {residual:e} exceeds tolerance; degree bound too small"
    )]
    DegreeOverflow { residual: f64 },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("vector is zero")]
    ZeroVector,
    #[error("system is not square: {outputs} outputs, {inputs} inputs")]
    NotSquare { outputs: usize, inputs: usize },
    #[error("system has no output matrix")]
    MissingOutput,
    #[error("system matrix loses rank identically; zero polynomial is zero")]
    DegenerateSystem,
    #[error("parse error{}: {message}", location(.row, .col))]
    Parse {
        message: String,
        row: Option<usize>,
        col: Option<usize>,
    },
    #[error("input matrix has rank {rank} < {inputs}")]
    RankDeficientB { rank: usize, inputs: usize },
    #[error("lower block of the permuted input matrix is singular")]
    SingularB2,
    #[error("pair is not controllable (controllability rank {rank} < {n})")]
    Uncontrollable { rank: usize, n: usize },
    #[error("no admissible input direction found within {attempts} attempts")]
    AttemptsExhausted { attempts: usize },
    #[error("eigenvalue iteration did not converge after {attempts} restarts")]
    NoConvergence { attempts: usize },
    #[error("target polynomial is zero")]
    ZeroTargetPolynomial,
    #[error("target degree {degree} exceeds n - r = {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("target zero {zero} coincides with eigenvalue {eigenvalue} of A")]
    EigenvalueCollision { zero: String, eigenvalue: String },
    #[error("invalid random policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

fn location(row: &Option<usize>, col: &Option<usize>) -> String {
    match (row, col) {
        (Some(r), Some(c)) => format!(" at row {r}, column {c}"),
        (Some(r), None) => format!(" at row {r}"),
        _ => String::new(),
    }
}

impl Error {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix => "SingularMatrix",
            Error::NonSquareMatrix { .. } => "NonSquareMatrix",
            Error::NonFinite { .. } => "NonFinite",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::ZeroVector => "ZeroVector",
            Error::NotSquare { .. } => "NotSquare",
            Error::MissingOutput => "MissingOutput",
            Error::DegenerateSystem => "DegenerateSystem",
            Error::Parse { .. } => "ParseError",
            Error::RankDeficientB { .. } => "RankDeficientB",
            Error::SingularB2 => "SingularB2",
            Error::Uncontrollable { .. } => "Uncontrollable",
            Error::AttemptsExhausted { .. } => "AttemptsExhausted",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ZeroTargetPolynomial => "ZeroTargetPolynomial",
            Error::DegreeTooHigh { .. } => "DegreeTooHigh",
            Error::EigenvalueCollision { .. } => "EigenvalueCollision",
            Error::InvalidPolicy(_) => "InvalidPolicy",
            Error::InvalidTarget(_) => "InvalidTarget",
            Error::VerificationFailed(_) => "VerificationFailed",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
