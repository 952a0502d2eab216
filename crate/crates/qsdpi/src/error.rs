use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),
    #[error("function undefined on eigenvalue {0:e}")]
    FunctionUndefined(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("support of rho is not contained in support of sigma (residual {0:e})")]
    SupportViolation(f64),
    #[error("reference state is singular (smallest eigenvalue {0:e})")]
    SingularSigma(f64),
    #[error("reference output state is singular (smallest eigenvalue {0:e})")]
    SingularReference(f64),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("no closed form for {0}")]
    NoClosedForm(String),
    #[error("missing leaf coefficient for {0}")]
    MissingLeafCoefficient(String),
    #[error("optimizer stalled: {0}")]
    OptimizerStall(String),
    #[error("map is not invertible: {0}")]
    NotInvertible(String),
    #[error("dimension too large: {0}")]
    DimensionTooLarge(String),
    #[error("division undefined at ({a}, {b}): A_h = 0 but A_f = {value:e}")]
    DivisionUndefined { a: usize, b: usize, value: f64 },
    #[error("cutoff too small: tail mass {tail:e} exceeds {limit:e}")]
    CutoffTooSmall { tail: f64, limit: f64 },
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("generator is not primitive")]
    NotPrimitive,
    #[error("generators have different kernels: {0}")]
    KernelMismatch(String),
    #[error("unknown kind: {0}")]
    UnknownKind(String),
}

pub type Result<T> = std::result::Result<T, Error>;
