use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("zero-forcing infeasible: n_e = {n_e} >= n_t = {n_t}")]
    Infeasible { n_t: usize, n_e: usize },

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("matrix is numerically rank deficient (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("qr: column {column} norm underflows")]
    Degenerate { column: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("bounds optimizer: stationarity residual {residual:e} after {iterations} iterations")]
    OptimizerFailed { residual: f64, iterations: usize },

    #[error("gaussian-approx quadrature: refinements disagree by {relative:e} (relative)")]
    QuadratureFailed { relative: f64 },

    #[error(
        "monte-carlo: only {failures} failures at one endpoint (need {required}); raise trials to about {suggested_trials}"
    )]
    InsufficientFailures {
        failures: u64,
        required: u64,
        suggested_trials: u64,
    },

    #[error("manifest: {0}")]
    Manifest(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }
}
