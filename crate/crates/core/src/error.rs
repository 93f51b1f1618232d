use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}{}", context_suffix(.context))]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("non-finite entry encountered in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),

    #[error("kernel mismatch: both elements must be built from the same kernel spec")]
    KernelMismatch,

    #[error("matrix is not Hermitian: skew part {distance:.3e} exceeds tolerance {tol:.3e}")]
    NonHermitian { distance: f64, tol: f64 },

    #[error(
        "singular linear system at ridge 0: smallest singular value {min_singular_value:.3e}, \
         least-squares residual {residual:.3e}; retry with a positive ridge"
    )]
    SingularSystem {
        min_singular_value: f64,
        residual: f64,
    },

    #[error("inner product has non-negligible imaginary part {imag:.3e} (broken kernel?)")]
    ComplexNorm { imag: f64 },

    #[error("semi-inner-product space mismatch: p {p_left} vs {p_right}, dim {dim_left} vs {dim_right}")]
    SpaceMismatch {
        p_left: f64,
        p_right: f64,
        dim_left: usize,
        dim_right: usize,
    },

    #[error("invalid exponent p = {0}: the compatible semi-inner product requires 1 < p < inf")]
    InvalidExponent(f64),

    #[error("point {0:?} is not among the sample's domain points")]
    PointNotInDomain(Vec<f64>),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("csv ingestion failed: {0}")]
    Csv(String),

    #[error("cannot parse {input:?} as a complex number (expected a real or \"a+bi\")")]
    ParseComplex { input: String },

    #[error("model file error: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn context_suffix(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
