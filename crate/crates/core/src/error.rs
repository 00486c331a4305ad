use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {dim} exceeds configured maximum {max}")]
    DimensionLimit { dim: usize, max: usize },

    #[error("matrix is not square or has the wrong number of entries ({0})")]
    Shape(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("matrix is not Hermitian (defect {defect:.3e} > {bound:.3e})")]
    NotHermitian { defect: f64, bound: f64 },

    #[error(
        "`{name}` is not a projection: hermiticity defect {hermiticity:.3e}, \
         idempotency defect {idempotency:.3e} (bound {bound:.3e})"
    )]
    InvalidProjection {
        name: String,
        hermiticity: f64,
        idempotency: f64,
        bound: f64,
    },

    #[error(
        "`{name}` is not a density operator: hermiticity defect {hermiticity:.3e}, \
         trace defect {trace:.3e}, minimum eigenvalue {min_eigenvalue:.3e} (bound {bound:.3e})"
    )]
    InvalidDensity {
        name: String,
        hermiticity: f64,
        trace: f64,
        min_eigenvalue: f64,
        bound: f64,
    },

    #[error("`{a}` and `{b}` are not orthogonal (defect {defect:.3e})")]
    NotOrthogonal { a: String, b: String, defect: f64 },

    #[error("`{a}` and `{b}` do not commute (defect {defect:.3e}); they are not co-measurable")]
    NotCommuting { a: String, b: String, defect: f64 },

    #[error("conditional probability given `{given}` is undefined: Tr(rho {given}) = {probability:.3e}")]
    UndefinedConditional { given: String, probability: f64 },

    #[error("probability {value:.3e} of `{what}` is outside [0, 1]")]
    ProbabilityRange { what: String, value: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("complement lemma violated: T detects E is {direct} but T' detects E' is {complement}")]
    LemmaViolation { direct: bool, complement: bool },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("duplicate observable name `{0}`")]
    DuplicateName(String),

    #[error("too many observables for a joint distribution: {count} > {max}")]
    TooManyObservables { count: usize, max: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
