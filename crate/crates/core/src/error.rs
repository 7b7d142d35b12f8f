use thiserror::Error;

use crate::solver::{PicardReport, Trajectory};

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-zero y-mean: {0}")]
    MeanMode(String),
    #[error("coefficient symmetry broken: max defect {defect:e}")]
    Symmetry { defect: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("backward time step dt = {0} requested")]
    BackwardTime(f64),
    #[error("Picard iteration did not contract (ratio {:.3e} after {} iterations)", .report.contraction_ratio, .report.iterations)]
    ContractionFailure {
        report: PicardReport,
        partial: Option<Box<Trajectory>>,
    },
    #[error("unresolved stiffness: alpha*ny^2*dt = {0:.3e} > 1")]
    Stiffness(f64),
    #[error("non-uniform snapshot spacing: {0}")]
    Spacing(String),
    #[error("insufficient time resolution: {0}")]
    Resolution(String),
    #[error("pole of the resonance function at zeta = {0}")]
    Pole(f64),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
