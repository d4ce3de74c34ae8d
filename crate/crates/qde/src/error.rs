use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by quaternion algebra, the adjoint backend and the solvers.
///
/// [`Error::name`] returns the stable short name used by the CLI when mapping
/// failures to exit codes, so variants can be matched in scripts.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("DomainError: {0}")]
    Domain(String),

    /// Malformed quaternion literal or matrix text; `offset` is the byte
    /// position in the original input.
    #[error("ParseError at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// Operand shapes are incompatible.
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    /// A square matrix was required.
    #[error("NonSquare: matrix is {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    /// A complex matrix does not satisfy the adjoint block symmetry.
    #[error("StructureError: {0}")]
    Structure(String),

    /// Double determinant below the singularity threshold.
    #[error("SingularMatrix: |ddet| = {ddet:e} <= threshold {threshold:e}")]
    Singular { ddet: f64, threshold: f64 },

    /// A truncated series hit its term cap before meeting the stopping rule.
    #[error("ConvergenceError: {0}")]
    Convergence(String),

    /// The QR iteration on the complex adjoint did not converge.
    #[error("EigenFailure: {0}")]
    EigenFailure(String),

    /// A back-mapped eigenpair failed its residual bound.
    #[error("ResidualTooLarge: residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    /// Adaptive quadrature failed to converge.
    #[error("IntegrationError: {0}")]
    Integration(String),

    /// A trajectory handed to a residual check does not solve its system.
    #[error("NotASolution: precondition residual {residual:e} exceeds {limit:e}")]
    NotASolution { residual: f64, limit: f64 },

    /// The commutativity hypothesis of the time-varying diagonal closed form
    /// fails; callers must fall back to the numeric integrator.
    #[error("ConditionViolated: coefficient {index} has commutator norm {commutator:e} at t = {t}")]
    ConditionViolated {
        index: usize,
        t: f64,
        commutator: f64,
    },

    /// Not enough right-independent eigenvectors for the eigen fundamental
    /// matrix; callers must fall back to the adjoint exponential.
    #[error("DefectiveMatrix: {0}")]
    Defective(String),

    /// Axis-angle constructor requires a unit axis.
    #[error("NonUnitAxis: axis norm {0} is not 1")]
    NonUnitAxis(f64),

    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),

    #[error("JsonError: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short name for structured reporting (CLI exit paths).
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Parse { .. } => "ParseError",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonSquare { .. } => "NonSquare",
            Error::Structure(_) => "StructureError",
            Error::Singular { .. } => "SingularMatrix",
            Error::Convergence(_) => "ConvergenceError",
            Error::EigenFailure(_) => "EigenFailure",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::Integration(_) => "IntegrationError",
            Error::NotASolution { .. } => "NotASolution",
            Error::ConditionViolated { .. } => "ConditionViolated",
            Error::Defective(_) => "DefectiveMatrix",
            Error::NonUnitAxis(_) => "NonUnitAxis",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }

    /// True for failures of the numerics (as opposed to bad input): these map
    /// to CLI exit code 3.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::Convergence(_)
                | Error::EigenFailure(_)
                | Error::ResidualTooLarge { .. }
                | Error::Integration(_)
                | Error::NotASolution { .. }
                | Error::ConditionViolated { .. }
                | Error::Defective(_)
        )
    }
}
