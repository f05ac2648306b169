use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown tiling `{0}`")]
    UnknownTiling(String),

    #[error(
        "tiling {0} has no attachment table; only trH, SS, RTH, STH and trTH can be assembled"
    )]
    UnsupportedTiling(String),

    #[error("potential is not even: max |q(x) - q(a-x)| = {residual:e} exceeds {tolerance:e}")]
    NotEven { residual: f64, tolerance: f64 },

    #[error("lambda = {lambda} does not satisfy the generator equation (residual {residual:e})")]
    GeneratorMismatch { lambda: f64, residual: f64 },

    #[error("no eigenfunction support found: {0}")]
    NoSupport(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be finite, got {v}"
        )))
    }
}
