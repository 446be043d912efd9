use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, cpow, ONE, ZERO};
use crate::special_functions::{qgamma, QNome};

use super::forms::MultiplicativeForm;

/// Parameters of the explicit 2-form: `q`, `κ`, the q-Gamma nome `p` and the
/// step `γ`.
#[derive(Debug, Clone)]
pub struct TwoFormParams {
    q: Complex64,
    kappa: Complex64,
    base: QNome,
    gamma: Complex64,
}

impl TwoFormParams {
    /// Uses `p = q^{-2κ}`, or `q^{2κ}` when that is the one inside the unit disc.
    pub fn new(q: Complex64, kappa: Complex64, gamma: Complex64) -> Result<Self> {
        let p = cpow(q, -2.0 * kappa);
        let p = if p.norm() < 1.0 { p } else { cpow(q, 2.0 * kappa) };
        Self::with_nome(q, kappa, p, gamma)
    }

    pub fn with_nome(q: Complex64, kappa: Complex64, p: Complex64, gamma: Complex64) -> Result<Self> {
        if q == ZERO || !q.is_finite() {
            return Err(Error::InvalidParameter("q must be finite and nonzero".into()));
        }
        if kappa == ZERO || !kappa.is_finite() {
            return Err(Error::InvalidParameter("kappa must be finite and nonzero".into()));
        }
        if gamma == ZERO || !gamma.is_finite() {
            return Err(Error::InvalidParameter("gamma must be finite and nonzero".into()));
        }
        Ok(Self {
            q,
            kappa,
            base: QNome::new(p)?,
            gamma,
        })
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    pub fn p(&self) -> Complex64 {
        self.base.p()
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }
}

/// Staircase `ρ = ((n−1)/2, (n−3)/2, …, −(n−1)/2)`.
pub fn rho(n: usize) -> Vec<Complex64> {
    (0..n).map(|i| c((n as f64 - 1.0) / 2.0 - i as f64, 0.0)).collect()
}

/// `σ_{l,m}(λ)`; for `m < l` it is the q-Gamma quotient in
/// `x = ((λ+ρ)_l − (λ+ρ)_m)/κ`, and `σ_{m,l} = 1/σ_{l,m}`.
pub fn sigma(l: usize, m: usize, lambda: &[Complex64], params: &TwoFormParams) -> Result<Complex64> {
    let n = lambda.len();
    if l >= n || m >= n || l == m {
        return Err(Error::InvalidParameter(format!("sigma indices ({l},{m}) for rank {n}")));
    }
    if l < m {
        return Ok(ONE / sigma(m, l, lambda, params)?);
    }
    let r = rho(n);
    let x = ((lambda[l] + r[l]) - (lambda[m] + r[m])) / params.kappa;
    let k = ONE / params.kappa;
    let g = |z| qgamma(z, &params.base);
    let v = params.q * g(ONE + x + k)? * g(-x)? / (g(ONE + x)? * g(-x + k)?);
    if v == ZERO || !v.is_finite() {
        return Err(Error::Pole {
            what: format!("sigma_({l},{m})"),
            at: x,
        });
    }
    Ok(v)
}

/// `φ_{i,j}(λ) = σ_{j,i}(λ/γ − ρ)`.
pub fn explicit_two_form(params: &TwoFormParams, n: usize) -> Result<MultiplicativeForm> {
    if n < 2 {
        return Err(Error::InvalidParameter("the 2-form needs rank at least 2".into()));
    }
    let params = params.clone();
    let r = rho(n);
    MultiplicativeForm::new(2, n, move |idx, lambda| {
        let arg: Vec<Complex64> = lambda.iter().zip(&r).map(|(x, p)| x / params.gamma - p).collect();
        sigma(idx[1], idx[0], &arg, &params)
    })
}

/// `ξ_j(λ) = Π_{i<j} q^{λ_i}`.
pub fn witness_xi(params: &TwoFormParams, n: usize) -> Result<MultiplicativeForm> {
    let q = params.q;
    MultiplicativeForm::one_form(n, move |j, l| Ok(l[..j].iter().map(|x| cpow(q, *x)).product()))
}

/// `η_j(λ) = Π_{i<j} Γ_p((λ_i − λ_j + 1)/κ)^{-1}`.
pub fn witness_eta(params: &TwoFormParams, n: usize) -> Result<MultiplicativeForm> {
    let params = params.clone();
    MultiplicativeForm::one_form(n, move |j, l| {
        let mut acc = ONE;
        for i in 0..j {
            acc /= qgamma((l[i] - l[j] + ONE) / params.kappa, &params.base)?;
        }
        Ok(acc)
    })
}

/// `ζ_j(λ) = Π_{i<j} Γ_p(1 + (λ_j − λ_i)/κ)^{-1}`.
pub fn witness_zeta(params: &TwoFormParams, n: usize) -> Result<MultiplicativeForm> {
    let params = params.clone();
    MultiplicativeForm::one_form(n, move |j, l| {
        let mut acc = ONE;
        for i in 0..j {
            acc /= qgamma(ONE + (l[j] - l[i]) / params.kappa, &params.base)?;
        }
        Ok(acc)
    })
}

/// `ξηζ`, whose `d_1` is the 2-form with its argument rescaled by `γ`.
pub fn exactness_witness(params: &TwoFormParams, n: usize) -> Result<MultiplicativeForm> {
    witness_xi(params, n)?
        .product(&witness_eta(params, n)?)?
        .product(&witness_zeta(params, n)?)
}

/// `ψ(λ/γ)` with `ψ = ξηζ`, so that `d_γ` of it is the 2-form itself.
pub fn exactness_witness_scaled(params: &TwoFormParams, n: usize) -> Result<MultiplicativeForm> {
    Ok(exactness_witness(params, n)?.rescale_argument(ONE / params.gamma))
}
