//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid: {0}")]
    Grid(String),

    #[error("field is in the {found:?} domain, expected {expected:?}")]
    Domain {
        expected: crate::grid::Domain,
        found: crate::grid::Domain,
    },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("sigma = {sigma} is not representable: violates {bound}")]
    UnrepresentableSigma { sigma: f64, bound: String },

    #[error("operation on a zero field")]
    ZeroField,

    #[error("negative duration T = {0}")]
    NegativeDuration(f64),

    #[error("T = 0 has no Fresnel kernel; use the spectral propagator")]
    FresnelZeroDuration,

    #[error(
        "chirp-sampling guard failed: curvature {curvature:.6e} exceeds the admissible {max:.6e}"
    )]
    ChirpGuard { curvature: f64, max: f64 },

    #[error("recoil guard failed: {0}")]
    RecoilGuard(String),

    #[error("invalid pulse: {0}")]
    Pulse(String),

    #[error("pattern: {0}")]
    Pattern(String),

    #[error("negative phase entry {value:.3e}; light intensity cannot be negative")]
    NegativePhase { value: f64 },

    #[error("interferometer: {0}")]
    Interferometer(String),

    #[error("degenerate fit: {0}")]
    Fit(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
