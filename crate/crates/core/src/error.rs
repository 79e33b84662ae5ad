use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("QR iteration did not converge; stuck at subdiagonal {index}")]
    NoConvergence { index: usize },

    #[error("singular matrix: pivot {index} vanishes")]
    Singular { index: usize },

    #[error("factor I - C_γ is singular at γ = {gamma}")]
    SingularFactor { gamma: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("chemical potential {mu} lies outside the band [-2η, 2η] with η = {eta}")]
    BandEdge { mu: f64, eta: f64 },

    #[error("the formula requires a finite bias (μ_L ≠ μ_R)")]
    ZeroBias,

    #[error("only the symmetric configuration is supported: {0}")]
    Scope(String),

    #[error("eigenvalue {value} lies outside [0, 1]")]
    Spectrum { value: f64 },

    #[error("branch cut problem: {0}")]
    Branch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
