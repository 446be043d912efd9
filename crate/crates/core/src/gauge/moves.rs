use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::felder::gln_pattern_violation;
use crate::linalg::{max_entry_norm, CMatrix, ONE, ZERO};
use crate::qdybe::Representation;
use crate::weight::{embed, two_factors, DynamicalOperator, WeightedSpace};

use super::forms::MultiplicativeForm;

pub type SpectralScalar = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// `R(u,λ) ↦ c(u) R(u,λ)`.
pub fn gauge_scale(r: &DynamicalOperator, c: SpectralScalar) -> Result<DynamicalOperator> {
    let inner = r.clone();
    Ok(DynamicalOperator::new(r.factors().to_vec(), r.step(), move |u, l| Ok(inner.eval(u, l)? * c(u)?))?
        .with_singularity_arc(r.singularity()))
}

/// `R(u,λ) ↦ R(au, bλ + μ)`; the step becomes `γ/b`.
pub fn gauge_reparam(r: &DynamicalOperator, a: Complex64, b: Complex64, mu: &[Complex64]) -> Result<DynamicalOperator> {
    if a == ZERO || b == ZERO {
        return Err(Error::InvalidParameter("reparametrisation needs nonzero a and b".into()));
    }
    if mu.len() != r.rank() {
        return Err(Error::DimensionMismatch(format!("mu of length {} for rank {}", mu.len(), r.rank())));
    }
    let map = {
        let mu = mu.to_vec();
        move |u: Complex64, l: &[Complex64]| -> (Complex64, Vec<Complex64>) {
            (a * u, l.iter().zip(&mu).map(|(x, m)| b * x + m).collect())
        }
    };
    let inner = r.clone();
    let eval_map = map.clone();
    let op = DynamicalOperator::new(r.factors().to_vec(), r.step() / b, move |u, l| {
        let (u2, l2) = eval_map(u, l);
        inner.eval(u2, &l2)
    })?;
    Ok(match r.singularity() {
        Some(pred) => op.with_singularity(move |u, l| {
            let (u2, l2) = map(u, l);
            pred(u2, &l2)
        }),
        None => op,
    })
}

fn check_gln(r: &DynamicalOperator, rank: usize) -> Result<()> {
    let (v, w) = two_factors(r)?;
    let standard = WeightedSpace::standard(rank);
    if v != standard || w != standard {
        return Err(Error::InvalidParameter("gl_n-type operators act on C^n ⊗ C^n with standard weights".into()));
    }
    Ok(())
}

/// Multiply the `E_mm ⊗ E_ll` entries (`m ≠ l`) of a `gl_n`-type `R` by `φ_{m,l}(λ)`.
///
/// Closedness of `φ` is the caller's precondition; see
/// [`closedness_defect`](super::closedness_defect).
pub fn gauge_twist(r: &DynamicalOperator, phi: &MultiplicativeForm) -> Result<DynamicalOperator> {
    if phi.degree() != 2 {
        return Err(Error::InvalidParameter(format!("twist needs a 2-form, got degree {}", phi.degree())));
    }
    let n = phi.rank();
    check_gln(r, n)?;
    let (inner, phi) = (r.clone(), phi.clone());
    Ok(DynamicalOperator::new(r.factors().to_vec(), r.step(), move |u, l| {
        let mut m = inner.eval(u, l)?;
        let tol = 1e-12 * max_entry_norm(&m).max(1.0);
        if let Some((row, col, value)) = gln_pattern_violation(&m, n, tol) {
            return Err(Error::NotGlnType { row, col, value });
        }
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    m[(a * n + b, a * n + b)] *= phi.component(&[a, b], l)?;
                }
            }
        }
        Ok(m)
    })?
    .with_singularity_arc(r.singularity()))
}

/// `ξ(λ) = Σ_a ζ_a(λ)^{-1} E_aa`: the diagonal conjugating `R` into its
/// twist by `d_γζ`.
pub fn twist_matrix(zeta: &MultiplicativeForm, lambda: &[Complex64]) -> Result<CMatrix> {
    if zeta.degree() != 1 {
        return Err(Error::InvalidParameter("twist matrix needs a 1-form".into()));
    }
    let diag = (0..zeta.rank())
        .map(|a| Ok(ONE / zeta.component(&[a], lambda)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_diagonal(&DVector::from_vec(diag)))
}

fn inverse_twist_matrix(zeta: &MultiplicativeForm, lambda: &[Complex64]) -> Result<CMatrix> {
    let diag = (0..zeta.rank())
        .map(|a| zeta.component(&[a], lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_diagonal(&DVector::from_vec(diag)))
}

/// `R̃ = (ξ^{(1)}(λ−γh^{(2)}))^{-1} (ξ^{(2)}(λ))^{-1} R(u,λ) ξ^{(1)}(λ) ξ^{(2)}(λ−γh^{(1)})`.
///
/// Agrees with `gauge_twist(R, d_γζ)`; kept as an independent route.
pub fn conjugated_rmatrix(r: &DynamicalOperator, zeta: &MultiplicativeForm) -> Result<DynamicalOperator> {
    let n = zeta.rank();
    check_gln(r, n)?;
    let slots = r.factors().to_vec();
    let step = r.step();
    let (inner, zeta) = (r.clone(), zeta.clone());
    Ok(DynamicalOperator::new(slots.clone(), step, move |u, l| {
        let xi_inv = |x: &[Complex64]| inverse_twist_matrix(&zeta, x);
        let xi = |x: &[Complex64]| twist_matrix(&zeta, x);
        let a = embed(xi_inv, &slots, &slots, &[0], &[1], l, step)?;
        let b = embed(xi_inv, &slots, &slots, &[1], &[], l, step)?;
        let c = embed(xi, &slots, &slots, &[0], &[], l, step)?;
        let d = embed(xi, &slots, &slots, &[1], &[0], l, step)?;
        Ok(a * b * inner.eval(u, l)? * c * d)
    })?
    .with_singularity_arc(r.singularity()))
}

/// `L̃(u,λ) = (ξ^{(1)}(λ−γh^{(2)}))^{-1} L(u,λ) ξ^{(1)}(λ)`: the image of a
/// representation of `R` under the equivalence onto representations of the
/// twist of `R` by `d_γζ`. Morphisms are unchanged.
pub fn twist_equivalence(rep: &Representation, zeta: &MultiplicativeForm) -> Result<Representation> {
    let n = zeta.rank();
    if rep.auxiliary() != &WeightedSpace::standard(n) {
        return Err(Error::InvalidParameter("twist equivalence needs auxiliary space C^n".into()));
    }
    if zeta.degree() != 1 {
        return Err(Error::InvalidParameter("twist equivalence needs a 1-form".into()));
    }
    let slots = vec![rep.auxiliary().clone(), rep.space().clone()];
    let step = rep.step();
    let (l, zeta) = (rep.l_operator().clone(), zeta.clone());
    let op = DynamicalOperator::new(slots.clone(), step, move |u, lam| {
        let left = embed(|x| inverse_twist_matrix(&zeta, x), &slots, &slots, &[0], &[1], lam, step)?;
        let right = embed(|x| twist_matrix(&zeta, x), &slots, &slots, &[0], &[], lam, step)?;
        Ok(left * l.eval_checked(u, lam)? * right)
    })?;
    Representation::new(op.with_singularity_arc(rep.l_operator().singularity()))
}
