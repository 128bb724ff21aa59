use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "series budget exceeded: no convergence within {max_terms} terms (last term magnitude {last_term:e})"
    )]
    SeriesBudgetExceeded { max_terms: usize, last_term: f64 },

    #[error(
        "series cancellation too severe: sum of term magnitudes {term_mass:e} against value {value:e} leaves no reliable digits"
    )]
    PrecisionLoss { term_mass: f64, value: f64 },

    #[error("unsupported dimension {0}: the rotation group must act transitively on spheres (dim >= 2)")]
    UnsupportedDimension(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator depth {depth} exceeds the depth cap {cap}")]
    DepthCapExceeded { depth: usize, cap: usize },

    #[error("radius {radius} lies outside the sampled profile range [{lo}, {hi}]")]
    OutOfSampledRange { radius: f64, lo: f64, hi: f64 },

    #[error("degree check is ill-conditioned at level {level}: every composition has sup-norm in (tol, 10*tol] (max {max:e}, tol {tol:e})")]
    IllConditioned { level: usize, max: f64, tol: f64 },

    #[error(
        "dictionary is rank-deficient (condition estimate {condition:e}); use a ridge parameter > 0 or remove dependent spectrum entries"
    )]
    Conditioning { condition: f64 },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
