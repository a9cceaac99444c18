use thiserror::Error;

/// Unified error type for the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation dimension must be at least 2, got {0}")]
    TruncationTooSmall(usize),

    #[error("Fock level {level} is outside the truncated space (dim {dim})")]
    FockLevelOutOfRange { level: usize, dim: usize },

    #[error("invalid state specification: {0}")]
    InvalidState(String),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("matrix is not Hermitian within tolerance (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("eigensolver failed to converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("Kraus indices (m={m}, n={n}, l={l}) out of range for dim {dim}")]
    KrausIndexOutOfRange { m: usize, n: usize, l: usize, dim: usize },

    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),

    #[error(
        "RK4 step too large for stability: {steps} steps gives \
         h*(2*gamma*N + |chi|*N^2) >= 0.1; use at least {required} steps"
    )]
    Rk4Unstable { steps: usize, required: usize },

    #[error(
        "Liouvillian propagator needs an N^2 x N^2 dense matrix; dim {dim} \
         exceeds the limit {limit} (use the RK4 solver instead)"
    )]
    LiouvilleDimTooLarge { dim: usize, limit: usize },

    #[error("fidelity reference must be a pure state, got {0}")]
    MixedReference(String),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] serde_json::Error),

    #[error("invalid config field `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("solver `{solver}` failed: {source}")]
    Solver {
        solver: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for usage/config problems, 1 for
    /// everything that failed at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigParse(_) | Error::ConfigInvalid { .. } | Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
