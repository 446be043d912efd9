//! Felder's elliptic dynamical R-matrix of `gl_n` type.
//!
//! ```text
//! R(u,λ) = Σ_m E_mm⊗E_mm + Σ_{m≠l} α(u,λ_m−λ_l) E_mm⊗E_ll + β(u,λ_m−λ_l) E_lm⊗E_ml
//! α(u,λ) = θ₁(λ+γ)/θ₁(λ) · θ₁(u)/θ₁(u−γ)
//! β(u,λ) = θ₁(γ)/θ₁(λ) · θ₁(u−λ)/θ₁(u−γ)
//! ```
//!
//! `λ` is a full length-`n` vector; only its coordinate differences enter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::special_functions::{theta1, EllipticModulus};
use crate::weight::{DynamicalOperator, WeightedSpace};

/// Points closer than this to the period lattice count as poles.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Sampling keeps arguments at least this far from the lattice.
pub const POLE_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FelderParams {
    n: usize,
    modulus: EllipticModulus,
    gamma: Complex64,
}

impl FelderParams {
    pub fn new(n: usize, tau: Complex64, gamma: Complex64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("rank n must be at least 2, got {n}")));
        }
        let modulus = EllipticModulus::new(tau)?;
        if gamma == ZERO {
            return Err(Error::InvalidParameter("step gamma must be nonzero".into()));
        }
        if modulus.lattice_distance(gamma) <= POLE_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "step gamma = {gamma} lies on the period lattice"
            )));
        }
        Ok(Self { n, modulus, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &EllipticModulus {
        &self.modulus
    }

    pub fn tau(&self) -> Complex64 {
        self.modulus.tau()
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    /// Whether `(u, λ)` is within [`POLE_MARGIN`] of a pole of some entry.
    pub fn near_pole(&self, u: Complex64, lambda: &[Complex64]) -> bool {
        if self.modulus.lattice_distance(u - self.gamma) < POLE_MARGIN {
            return true;
        }
        lambda.iter().enumerate().any(|(m, lm)| {
            lambda
                .iter()
                .skip(m + 1)
                .any(|ll| self.modulus.lattice_distance(lm - ll) < POLE_MARGIN)
        })
    }

    fn check_denominators(&self, u: Complex64, lam: Complex64, what: &str) -> Result<()> {
        if self.modulus.lattice_distance(lam) <= POLE_TOLERANCE {
            return Err(Error::Pole { what: format!("{what} in lambda"), at: lam });
        }
        if self.modulus.lattice_distance(u - self.gamma) <= POLE_TOLERANCE {
            return Err(Error::Pole { what: format!("{what} in u"), at: u });
        }
        Ok(())
    }
}

pub fn felder_alpha(u: Complex64, lam: Complex64, params: &FelderParams) -> Result<Complex64> {
    params.check_denominators(u, lam, "alpha")?;
    let (m, g) = (params.modulus(), params.gamma);
    Ok(theta1(lam + g, m)? / theta1(lam, m)? * theta1(u, m)? / theta1(u - g, m)?)
}

pub fn felder_beta(u: Complex64, lam: Complex64, params: &FelderParams) -> Result<Complex64> {
    params.check_denominators(u, lam, "beta")?;
    let (m, g) = (params.modulus(), params.gamma);
    Ok(theta1(g, m)? / theta1(lam, m)? * theta1(u - lam, m)? / theta1(u - g, m)?)
}

/// Dense value of Felder's R-matrix at one point.
pub fn felder_matrix(u: Complex64, lambda: &[Complex64], params: &FelderParams) -> Result<CMatrix> {
    let n = params.n;
    if lambda.len() != n {
        return Err(Error::DimensionMismatch(format!("lambda of length {} for n = {n}", lambda.len())));
    }
    let tag = |e: Error, m: usize, l: usize| match e {
        Error::Pole { what, at } => Error::Pole {
            what: format!("{what} at entry (m,l) = ({m},{l})"),
            at,
        },
        other => other,
    };
    let mut r = CMatrix::zeros(n * n, n * n);
    for m in 0..n {
        r[(m * n + m, m * n + m)] = ONE;
        for l in 0..n {
            if m == l {
                continue;
            }
            let lam = lambda[m] - lambda[l];
            // E_mm ⊗ E_ll fixes e_m ⊗ e_l; E_lm ⊗ E_ml sends it to e_l ⊗ e_m
            r[(m * n + l, m * n + l)] = felder_alpha(u, lam, params).map_err(|e| tag(e, m, l))?;
            r[(l * n + m, m * n + l)] = felder_beta(u, lam, params).map_err(|e| tag(e, m, l))?;
        }
    }
    Ok(r)
}

/// Felder's R-matrix as a dynamical operator on `C^n ⊗ C^n` with step `γ`.
pub fn felder_rmatrix(params: &FelderParams) -> DynamicalOperator {
    let v = WeightedSpace::standard(params.n);
    let p = *params;
    let q = *params;
    DynamicalOperator::new(vec![v.clone(), v], params.gamma, move |u, l| felder_matrix(u, l, &p))
        .expect("standard factors share a rank")
        .with_singularity(move |u, l| q.near_pole(u, l))
}

/// First entry of `r` outside the `gl_n` pattern
/// `{E_mm⊗E_ll, E_lm⊗E_ml}` whose modulus exceeds `tol`.
pub fn gln_pattern_violation(r: &CMatrix, n: usize, tol: f64) -> Option<(usize, usize, Complex64)> {
    for row in 0..r.nrows() {
        for col in 0..r.ncols() {
            let (a, b) = (col / n, col % n);
            let allowed = row == col || row == b * n + a;
            if !allowed && r[(row, col)].norm() > tol {
                return Some((row, col, r[(row, col)]));
            }
        }
    }
    None
}
