use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};

pub type ScalarFn = Arc<dyn Fn(&[Complex64]) -> Result<Complex64> + Send + Sync>;
type ComponentFn = dyn Fn(&[usize], &[Complex64]) -> Result<Complex64> + Send + Sync;

/// Family `φ_{a_1…a_m}(λ)` of nonvanishing functions indexed by ordered
/// tuples of distinct indices in `0..rank`.
///
/// Components are evaluated lazily; nothing is tabulated.
#[derive(Clone)]
pub struct MultiplicativeForm {
    degree: usize,
    rank: usize,
    component: Arc<ComponentFn>,
}

impl fmt::Debug for MultiplicativeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeForm")
            .field("degree", &self.degree)
            .field("rank", &self.rank)
            .finish()
    }
}

impl MultiplicativeForm {
    pub fn new<F>(degree: usize, rank: usize, component: F) -> Result<Self>
    where
        F: Fn(&[usize], &[Complex64]) -> Result<Complex64> + Send + Sync + 'static,
    {
        if degree > rank {
            return Err(Error::InvalidParameter(format!("degree {degree} exceeds rank {rank}")));
        }
        Ok(Self {
            degree,
            rank,
            component: Arc::new(component),
        })
    }

    /// The neutral form `𝟏`.
    pub fn one(degree: usize, rank: usize) -> Result<Self> {
        Self::new(degree, rank, |_, _| Ok(ONE))
    }

    /// 1-form from per-index functions.
    pub fn one_form<F>(rank: usize, component: F) -> Result<Self>
    where
        F: Fn(usize, &[Complex64]) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self::new(1, rank, move |idx, l| component(idx[0], l))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn component(&self, indices: &[usize], lambda: &[Complex64]) -> Result<Complex64> {
        if indices.len() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "{} indices for a form of degree {}",
                indices.len(),
                self.degree
            )));
        }
        if lambda.len() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "lambda of length {} for a form of rank {}",
                lambda.len(),
                self.rank
            )));
        }
        for (k, &a) in indices.iter().enumerate() {
            if a >= self.rank || indices[..k].contains(&a) {
                return Err(Error::InvalidParameter(format!("index tuple {indices:?} is not admissible")));
            }
        }
        let v = (self.component)(indices, lambda)?;
        if v == ZERO || !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Pole {
                what: format!("form component {indices:?}"),
                at: lambda.first().copied().unwrap_or(ZERO),
            });
        }
        Ok(v)
    }

    /// Group product, componentwise.
    pub fn product(&self, other: &MultiplicativeForm) -> Result<MultiplicativeForm> {
        if self.degree != other.degree || self.rank != other.rank {
            return Err(Error::DimensionMismatch("multiplying forms of different shape".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.degree, self.rank, move |i, l| Ok(a.component(i, l)? * b.component(i, l)?))
    }

    pub fn inverse(&self) -> MultiplicativeForm {
        let a = self.clone();
        Self::new(self.degree, self.rank, move |i, l| Ok(ONE / a.component(i, l)?)).expect("same shape")
    }

    /// `λ ↦ φ(s·λ)`.
    pub fn rescale_argument(&self, s: Complex64) -> MultiplicativeForm {
        let a = self.clone();
        Self::new(self.degree, self.rank, move |i, l| {
            let scaled: Vec<Complex64> = l.iter().map(|x| s * x).collect();
            a.component(i, &scaled)
        })
        .expect("same shape")
    }

    /// Largest `|φ_{…a_{i+1} a_i…} φ_{…a_i a_{i+1}…} − 1|` at `λ`.
    pub fn transposition_defect(&self, lambda: &[Complex64]) -> Result<f64> {
        let mut worst = 0.0_f64;
        for t in index_tuples(self.degree, self.rank) {
            let v = self.component(&t, lambda)?;
            for i in 0..t.len().saturating_sub(1) {
                let mut s = t.clone();
                s.swap(i, i + 1);
                worst = worst.max((self.component(&s, lambda)? * v - ONE).norm());
            }
        }
        Ok(worst)
    }
}

/// All ordered tuples of `degree` distinct indices in `0..rank`.
pub fn index_tuples(degree: usize, rank: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, degree: usize, rank: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == degree {
            out.push(prefix.clone());
            return;
        }
        for a in 0..rank {
            if !prefix.contains(&a) {
                prefix.push(a);
                extend(prefix, degree, rank, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(degree), degree, rank, &mut out);
    out
}

fn shift_down(lambda: &[Complex64], s: usize, gamma: Complex64) -> Vec<Complex64> {
    let mut shifted = lambda.to_vec();
    shifted[s] -= gamma;
    shifted
}

/// `δ_s f(λ) = f(λ) / f(λ_1, …, λ_s − γ, …, λ_n)`.
pub fn delta_s(f: ScalarFn, s: usize, gamma: Complex64) -> ScalarFn {
    Arc::new(move |lambda: &[Complex64]| {
        if s >= lambda.len() {
            return Err(Error::InvalidParameter(format!("index {s} out of range")));
        }
        let den = f(&shift_down(lambda, s, gamma))?;
        if den == ZERO {
            return Err(Error::Pole {
                what: format!("delta_{s} denominator"),
                at: lambda[s] - gamma,
            });
        }
        Ok(f(lambda)? / den)
    })
}

/// `(d_γφ)_{a_1…a_{m+1}} = Π_s (δ_{a_s} φ_{a_1…â_s…a_{m+1}})^{(−1)^{s+1}}`.
pub fn d_gamma(phi: &MultiplicativeForm, gamma: Complex64) -> Result<MultiplicativeForm> {
    if phi.degree() + 1 > phi.rank() {
        return Err(Error::InvalidParameter(format!(
            "d_gamma of a degree-{} form on rank {}",
            phi.degree(),
            phi.rank()
        )));
    }
    let phi = phi.clone();
    MultiplicativeForm::new(phi.degree() + 1, phi.rank(), move |idx, lambda| {
        let mut acc = ONE;
        let mut rest = Vec::with_capacity(idx.len() - 1);
        for (s, &a) in idx.iter().enumerate() {
            rest.clear();
            rest.extend(idx.iter().enumerate().filter(|&(k, _)| k != s).map(|(_, &b)| b));
            let ratio = phi.component(&rest, lambda)? / phi.component(&rest, &shift_down(lambda, a, gamma))?;
            // 0-based s: even positions carry exponent +1
            acc *= if s % 2 == 0 { ratio } else { ONE / ratio };
        }
        Ok(acc)
    })
}

/// Largest `|a − b| / max(1, |b|)` over all index tuples and sample points.
pub fn form_deviation(a: &MultiplicativeForm, b: &MultiplicativeForm, samples: &[Vec<Complex64>]) -> Result<f64> {
    if a.degree() != b.degree() || a.rank() != b.rank() {
        return Err(Error::DimensionMismatch("comparing forms of different shape".into()));
    }
    let tuples = index_tuples(a.degree(), a.rank());
    let mut worst = 0.0_f64;
    for lambda in samples {
        for t in &tuples {
            let (x, y) = (a.component(t, lambda)?, b.component(t, lambda)?);
            worst = worst.max((x - y).norm() / y.norm().max(1.0));
        }
    }
    Ok(worst)
}

/// Forms of top degree are closed, so their defect is zero.
pub fn closedness_defect(phi: &MultiplicativeForm, gamma: Complex64, samples: &[Vec<Complex64>]) -> Result<f64> {
    if phi.degree() == phi.rank() {
        return Ok(0.0);
    }
    let d = d_gamma(phi, gamma)?;
    form_deviation(&d, &MultiplicativeForm::one(d.degree(), d.rank())?, samples)
}

pub fn is_closed(phi: &MultiplicativeForm, gamma: Complex64, samples: &[Vec<Complex64>], tol: f64) -> Result<bool> {
    Ok(closedness_defect(phi, gamma, samples)? <= tol)
}

/// Deviation of `d_γψ` from `φ`.
pub fn exactness_defect(
    phi: &MultiplicativeForm,
    psi: &MultiplicativeForm,
    gamma: Complex64,
    samples: &[Vec<Complex64>],
) -> Result<f64> {
    if psi.degree() + 1 != phi.degree() {
        return Err(Error::DimensionMismatch(format!(
            "witness of degree {} for a form of degree {}",
            psi.degree(),
            phi.degree()
        )));
    }
    form_deviation(&d_gamma(psi, gamma)?, phi, samples)
}

pub fn is_exact_witness(
    phi: &MultiplicativeForm,
    psi: &MultiplicativeForm,
    gamma: Complex64,
    samples: &[Vec<Complex64>],
    tol: f64,
) -> Result<bool> {
    Ok(exactness_defect(phi, psi, gamma, samples)? <= tol)
}
