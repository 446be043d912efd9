//! The first Jacobi theta function and the q-Gamma function.
//!
//! Conventions:
//!
//! ```text
//! θ₁(z;τ) = 2 Σ_{n≥0} (−1)^n e^{πiτ(n+1/2)²} sin((2n+1)πz)
//! Γ_p(x)  = (1−p)^{1−x} Π_{n≥0} (1−p^{n+1}) / (1−p^{n+x})
//! ```
//!
//! Complex powers are `e^{b Log a}` with the principal logarithm. Both series
//! are summed in `f64` complex arithmetic and truncated adaptively; see
//! [`Truncation`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cpow, ONE, ZERO};

/// Adaptive truncation policy for the infinite sums and products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub epsilon: f64,
    pub max_terms: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            epsilon: 1e-15,
            max_terms: 10_000,
        }
    }
}

/// Elliptic modulus `τ` in the upper half plane together with its nome `e^{πiτ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticModulus {
    tau: Complex64,
    nome: Complex64,
}

impl EllipticModulus {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::Domain(format!("Im(tau) must be positive, got tau = {tau}")));
        }
        let nome = (Complex64::i() * PI * tau).exp();
        Ok(Self { tau, nome })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn nome(&self) -> Complex64 {
        self.nome
    }

    /// Distance from `z` to the nearest point of the period lattice `ℤ + τℤ`.
    ///
    /// These are exactly the zeros of `θ₁(·;τ)`.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        let b = z.im / self.tau.im;
        let a = z.re - b * self.tau.re;
        let (a0, b0) = (a.floor(), b.floor());
        let mut best = f64::INFINITY;
        for da in 0..2 {
            for db in 0..2 {
                let point = Complex64::new(a0 + da as f64, 0.0) + (b0 + db as f64) * self.tau;
                best = best.min((z - point).norm());
            }
        }
        best
    }
}

/// First Jacobi theta function with the default truncation policy.
pub fn theta1(z: Complex64, modulus: &EllipticModulus) -> Result<Complex64> {
    theta1_with(z, modulus, Truncation::default())
}

pub fn theta1_with(z: Complex64, modulus: &EllipticModulus, trunc: Truncation) -> Result<Complex64> {
    let i_pi_tau = Complex64::i() * PI * modulus.tau;
    let mut sum = ZERO;
    for n in 0..trunc.max_terms {
        let half = n as f64 + 0.5;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * (i_pi_tau * half * half).exp() * ((2.0 * half) * PI * z).sin();
        if term.norm() <= trunc.epsilon * sum.norm() {
            return Ok(2.0 * sum);
        }
        sum += term;
    }
    Err(Error::NonConvergence {
        terms: trunc.max_terms,
    })
}

/// Base `p` of the q-Gamma function, `0 < |p| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QNome {
    p: Complex64,
}

impl QNome {
    pub fn new(p: Complex64) -> Result<Self> {
        let r = p.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("q-Gamma base needs 0 < |p| < 1, got p = {p}")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> Complex64 {
        self.p
    }
}

/// Denominator factors smaller than this are treated as vanishing.
const POLE_TOLERANCE: f64 = 1e-14;

pub fn qgamma(x: Complex64, base: &QNome) -> Result<Complex64> {
    qgamma_with(x, base, Truncation::default())
}

pub fn qgamma_with(x: Complex64, base: &QNome, trunc: Truncation) -> Result<Complex64> {
    let p = base.p;
    let px = cpow(p, x);
    let mut product = cpow(ONE - p, ONE - x);
    // p^n, advanced by one multiplication per factor
    let mut pn = ONE;
    for _ in 0..trunc.max_terms {
        let den = ONE - pn * px;
        if den.norm() < POLE_TOLERANCE {
            return Err(Error::Pole {
                what: "q-Gamma".into(),
                at: x,
            });
        }
        let factor = (ONE - pn * p) / den;
        if (factor - ONE).norm() < trunc.epsilon {
            return Ok(product);
        }
        product *= factor;
        pn *= p;
    }
    Err(Error::NonConvergence {
        terms: trunc.max_terms,
    })
}
