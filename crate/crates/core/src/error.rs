use thiserror::Error;

/// Errors produced by the map, generator and dynamics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NonHermitianInput { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("unsupported dimension d = {0} (allowed 2..={max})", max = crate::linalg::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("parameter `{name}` is not finite or out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("bad mixing weights: {0}")]
    BadWeights(String),

    #[error("negative relaxation rate (kappa = {kappa}, d - 1 + nu = {offdiag})")]
    NegativeRate { kappa: f64, offdiag: f64 },

    #[error("operator is not traceless (|Tr X| = {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("vectors are not orthonormal (defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("region {which} is degenerate for d = {d}")]
    DegenerateRegion { which: String, d: usize },

    #[error("map is not unital (defect {defect:.3e})")]
    NotUnital { defect: f64 },

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("trajectory never enters the {region} region before t = {t_max} (final margin {final_margin:.3e})")]
    NoCrossing {
        region: String,
        t_max: f64,
        final_margin: f64,
    },

    #[error("schedule has no asymptotic map")]
    NoLimit,

    #[error("dynamical map is singular at t = {t} (condition estimate {condition:.3e})")]
    SingularMap { t: f64, condition: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("{0} iteration did not converge")]
    NoConvergence(&'static str),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
