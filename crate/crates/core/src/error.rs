use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown coin family `{0}`")]
    UnknownCoin(String),
    #[error("coin family `{name}` takes {expected} parameter(s), got {got}")]
    CoinArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("layout declares n = {n} but lists {got} coin(s)")]
    LayoutLength { n: usize, got: usize },
    #[error("vertex count {n} is not divisible by the pattern period {period}")]
    Divisibility { n: usize, period: usize },
    #[error("cycle needs at least {min} vertices, got {n}")]
    TooFewVertices { n: usize, min: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("eigensolver failed to converge")]
    EigenNonConvergence,
    #[error("Jacobi eigenvalue {value} lies outside [-1, 1]")]
    EigenvalueOutOfRange { value: f64 },
    #[error("lambda = {lambda} is on the boundary; use the boundary lift")]
    BoundaryLambda { lambda: f64 },
    #[error("lambda = {lambda} is not a boundary eigenvalue")]
    NotBoundary { lambda: f64 },
    #[error("supplementary vector collapsed (norm {norm:.3e})")]
    DegenerateSupplementary { norm: f64 },
    #[error("value {modulus} is not of unit modulus")]
    NotUnitModulus { modulus: f64 },
    #[error("least common multiple overflows 2^63; try a smaller q_max")]
    LcmOverflow,
    #[error("layout is not isospectral")]
    NotIsospectral,
    #[error("theorem not applicable: {0}")]
    TheoremInapplicable(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
