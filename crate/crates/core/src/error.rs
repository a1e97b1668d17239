use thiserror::Error;

/// Failures raised by the spectral and dynamical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("base frequencies are rationally dependent within the box: <j,k> = {value:e} at j = {index:?}")]
    RationalDependence { index: Vec<i64>, value: f64 },

    #[error("surface degenerate: min |1 + W| = {min_chord:e} <= eps_chord = {eps_chord:e}")]
    SurfaceDegenerate { min_chord: f64, eps_chord: f64 },

    #[error("non-finite coefficient in field `{field}` at t = {time}")]
    NonFinite { field: String, time: f64 },

    #[error("iteration did not contract: factors {factors:?}")]
    NonContraction { factors: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("lattice mismatch between operands")]
    LatticeMismatch,
}

pub type Result<T, E = WaveError> = std::result::Result<T, E>;
