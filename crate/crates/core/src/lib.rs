//! Numerics for quantum dynamical R-matrices with spectral parameter.
//!
//! * [`special_functions`]: `θ₁` and the q-Gamma function.
//! * [`weight`]: weighted spaces, dynamical operators, shifted evaluation.
//! * [`qdybe`]: representations, their tensor product and residual checks.
//! * [`felder`]: Felder's elliptic R-matrix of `gl_n` type.
//! * [`gauge`]: multiplicative forms, `d_γ`, gauge transformations.
//! * [`difference`]: power-series solutions of `f(pz) = G(f(z))` and the
//!   crossing map.

pub mod difference;
pub mod error;
pub mod felder;
pub mod gauge;
pub mod linalg;
pub mod qdybe;
pub mod sampling;
pub mod special_functions;
pub mod weight;

pub use error::{Error, Result};
pub use num_complex::Complex64;
