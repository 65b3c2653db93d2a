use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cutoff {cutoff} too small: {reason}")]
    CutoffTooSmall { cutoff: usize, reason: String },

    #[error("tolerance {tol:e} not reachable below the cutoff ceiling {ceiling}")]
    InfeasibleTolerance { tol: f64, ceiling: usize },

    #[error("normalization drift {drift:e} exceeds tail bound {tail_mass:e}")]
    NormalizationDrift { drift: f64, tail_mass: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mean photon number {0} is not representable by this probe family")]
    NotRepresentable(f64),

    #[error("no parameter reaches the target: {0}")]
    Infeasible(String),

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(String),

    #[error("dimension mismatch: probe has d = {probe}, sensing config has d = {config}")]
    DimensionMismatch { probe: usize, config: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dense path supports d <= {max}, got {d}")]
    TooLarge { d: usize, max: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Short stable identifier, used in the `error_code` column of sweep output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::CutoffTooSmall { .. } => "cutoff_too_small",
            Error::InfeasibleTolerance { .. } => "infeasible_tolerance",
            Error::NormalizationDrift { .. } => "normalization_drift",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotRepresentable(_) => "not_representable",
            Error::Infeasible(_) => "infeasible",
            Error::Singular(_) => "singular",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Domain(_) => "domain",
            Error::TooLarge { .. } => "too_large",
            Error::Config(_) => "config",
        }
    }
}
