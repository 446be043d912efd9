use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("pole of {what} at {at}")]
    Pole { what: String, at: Complex64 },

    /// The evaluation point lies inside a declared singular neighbourhood.
    #[error("evaluation point is near a declared singularity of {0}")]
    NearSingular(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not of gl_n type: entry {row},{col} = {value} lies outside the pattern")]
    NotGlnType { row: usize, col: usize, value: Complex64 },

    #[error("resonance at order {order}: resolvent norm {norm:e} exceeds {threshold:e}")]
    Resonance { order: usize, norm: f64, threshold: f64 },

    #[error("seed does not solve the first-order equation (residual {residual:e})")]
    SeedInconsistent { residual: f64 },

    #[error("constant term is not a fixed point of the map (residual {residual:e})")]
    NotFixedPoint { residual: f64 },

    #[error("no point of the sampled grid matches {0}")]
    MissingGridPoint(String),

    #[error("rejection sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
}
