//! Representations of a dynamical R-matrix and residuals of the defining
//! relations.
//!
//! Slot conventions follow the superscripts of the equations: for the
//! Yang–Baxter type relations the ambient space is `V ⊗ V ⊗ W` with slots
//! 0, 1, 2; for the tensor product `⊙` it is `V ⊗ W ⊗ U`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, max_entry_distance, try_inverse, CMatrix};
use crate::sampling::{Check, PointSample, TripleSample};
use crate::weight::{embed, shifted_eval, two_factors, DynamicalMorphism, DynamicalOperator, WeightedSpace};

/// Residuals at or below this pass.
pub const DEFAULT_TOL_PASS: f64 = 1e-9;
/// Residuals at or above this fail; anything between is inconclusive.
pub const DEFAULT_TOL_FAIL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn classify(residual: f64, tol_pass: f64, tol_fail: f64) -> Self {
        if residual <= tol_pass {
            Verdict::Pass
        } else if residual >= tol_fail || !residual.is_finite() {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    /// Worst of two verdicts: fail beats inconclusive beats pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

impl PartialOrd for Verdict {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Verdict {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let rank = |v: &Verdict| match v {
            Verdict::Pass => 0,
            Verdict::Inconclusive => 1,
            Verdict::Fail => 2,
        };
        rank(self).cmp(&rank(other))
    }
}

/// A pair `(W, L_W)` with `L_W` acting on `V ⊗ W`.
#[derive(Debug, Clone)]
pub struct Representation {
    auxiliary: WeightedSpace,
    space: WeightedSpace,
    l: DynamicalOperator,
}

impl Representation {
    pub fn new(l: DynamicalOperator) -> Result<Self> {
        let (auxiliary, space) = two_factors(&l)?;
        Ok(Self { auxiliary, space, l })
    }

    pub fn auxiliary(&self) -> &WeightedSpace {
        &self.auxiliary
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    pub fn l_operator(&self) -> &DynamicalOperator {
        &self.l
    }

    pub fn step(&self) -> Complex64 {
        self.l.step()
    }
}

/// `(V, R)`.
pub fn basic_rep(r: &DynamicalOperator) -> Result<Representation> {
    let (v, w) = two_factors(r)?;
    if v != w {
        return Err(Error::DimensionMismatch("R must act on V ⊗ V".into()));
    }
    Representation::new(r.clone())
}

/// `(W, 1)` for a space with zero weights.
pub fn trivial_rep(w: WeightedSpace, aux: WeightedSpace, step: Complex64) -> Result<Representation> {
    if !w.is_trivial() {
        return Err(Error::InvalidParameter("trivial representation needs zero weights".into()));
    }
    Representation::new(DynamicalOperator::identity(vec![aux, w], step)?)
}

/// `L^f = (1 ⊗ f(λ)^{-1}) L(u,λ) (1 ⊗ f(λ − γh^{(1)}))`.
pub fn twist_rep(rep: &Representation, f: &DynamicalMorphism) -> Result<Representation> {
    let w = rep.space().clone();
    if f.source().dim() != w.dim() || f.target().dim() != w.dim() {
        return Err(Error::DimensionMismatch("twist must be an endomorphism of W".into()));
    }
    let slots = vec![rep.auxiliary().clone(), w];
    let (l, f) = (rep.l.clone(), f.clone());
    let step = rep.step();
    let ambient = slots.clone();
    let op = DynamicalOperator::new(slots, step, move |u, lam| {
        let f_inv = try_inverse(&f.eval(lam)?, "twist f(λ)")?;
        let left = embed(|_| Ok(f_inv.clone()), &ambient, &ambient, &[1], &[], lam, step)?;
        let right = embed(|l2| f.eval(l2), &ambient, &ambient, &[1], &[0], lam, step)?;
        Ok(left * l.eval_checked(u, lam)? * right)
    })?;
    Representation::new(op.with_singularity_arc(rep.l.singularity()))
}

/// `L_{W⊙U}(u,λ) = L_W^{12}(u, λ − γh^{(3)}) L_U^{13}(u, λ)` on `V ⊗ (W ⊗ U)`.
pub fn tensor_reps(a: &Representation, b: &Representation) -> Result<Representation> {
    check_compatible(a, b)?;
    let ambient = vec![a.auxiliary().clone(), a.space().clone(), b.space().clone()];
    let space = a.space().tensor(b.space())?;
    let (la, lb) = (a.l.clone(), b.l.clone());
    let op = DynamicalOperator::new(vec![a.auxiliary().clone(), space], a.step(), move |u, lam| {
        let first = shifted_eval(&la, u, lam, &[0, 1], &[2], &ambient)?;
        let second = shifted_eval(&lb, u, lam, &[0, 2], &[], &ambient)?;
        Ok(first * second)
    })?;
    let singular = match (a.l.singularity(), b.l.singularity()) {
        (None, None) => None,
        (pa, pb) => Some(Arc::new(move |u: Complex64, lam: &[Complex64]| {
            pa.as_ref().is_some_and(|p| p(u, lam)) || pb.as_ref().is_some_and(|p| p(u, lam))
        }) as Arc<_>),
    };
    Representation::new(op.with_singularity_arc(singular))
}

fn check_compatible(a: &Representation, b: &Representation) -> Result<()> {
    if a.auxiliary() != b.auxiliary() {
        return Err(Error::DimensionMismatch("representations with different auxiliary spaces".into()));
    }
    if a.step() != b.step() {
        return Err(Error::InvalidParameter("representations with different steps".into()));
    }
    Ok(())
}

/// `(f ⊙ g)(λ) = f(λ − γh^{(2)}) ⊗ g(λ)`, the shift taken from the weight of
/// `g`'s source.
pub fn tensor_morphisms(f: &DynamicalMorphism, g: &DynamicalMorphism, step: Complex64) -> Result<DynamicalMorphism> {
    let source = f.source().tensor(g.source())?;
    let target = f.target().tensor(g.target())?;
    let in_slots = vec![f.source().clone(), g.source().clone()];
    let mid_slots = vec![f.target().clone(), g.source().clone()];
    let out_slots = vec![f.target().clone(), g.target().clone()];
    let (f, g) = (f.clone(), g.clone());
    DynamicalMorphism::new(source, target, move |lam| {
        let first = embed(|l| f.eval(l), &in_slots, &mid_slots, &[0], &[1], lam, step)?;
        let g_now = g.eval(lam)?;
        let second = embed(|_| Ok(g_now.clone()), &mid_slots, &out_slots, &[1], &[], lam, step)?;
        Ok(second * first)
    })
}

/// Residual of the representation relation at one sample, on `V ⊗ V ⊗ W`.
pub fn rep_residual_at(rep: &Representation, r: &DynamicalOperator, s: &TripleSample) -> Result<Check> {
    let (v, v2) = two_factors(r)?;
    if v != v2 || v.dim() != rep.auxiliary().dim() {
        return Err(Error::DimensionMismatch("R must act on V ⊗ V for the representation's V".into()));
    }
    let ambient = vec![v.clone(), v, rep.space().clone()];
    let l = rep.l_operator();
    let [u1, u2, u3] = s.u;
    let lam = &s.lambda;

    let lhs = shifted_eval(r, u1 - u2, lam, &[0, 1], &[2], &ambient)?
        * shifted_eval(l, u1 - u3, lam, &[0, 2], &[], &ambient)?
        * shifted_eval(l, u2 - u3, lam, &[1, 2], &[0], &ambient)?;
    let rhs = shifted_eval(l, u2 - u3, lam, &[1, 2], &[], &ambient)?
        * shifted_eval(l, u1 - u3, lam, &[0, 2], &[1], &ambient)?
        * shifted_eval(r, u1 - u2, lam, &[0, 1], &[], &ambient)?;

    let condition = [u1 - u2, u1 - u3, u2 - u3]
        .iter()
        .map(|&du| -> Result<f64> {
            Ok(condition_number(&r.eval(du, lam)?).max(condition_number(&l.eval(du, lam)?)))
        })
        .try_fold(0.0_f64, |acc, c| c.map(|c| acc.max(c)))?;

    Ok(Check {
        residual: max_entry_distance(&lhs, &rhs),
        condition,
    })
}

pub fn rep_residual(rep: &Representation, r: &DynamicalOperator, samples: &[TripleSample]) -> Result<f64> {
    samples
        .iter()
        .try_fold(0.0_f64, |acc, s| Ok(acc.max(rep_residual_at(rep, r, s)?.residual)))
}

/// QDYBE residual: the representation relation for the basic representation.
pub fn qdybe_residual_at(r: &DynamicalOperator, s: &TripleSample) -> Result<Check> {
    rep_residual_at(&basic_rep(r)?, r, s)
}

pub fn qdybe_residual(r: &DynamicalOperator, samples: &[TripleSample]) -> Result<f64> {
    let basic = basic_rep(r)?;
    rep_residual(&basic, r, samples)
}

/// Residual of `(1 ⊗ f(λ)) L_W(u,λ) = L_U(u,λ) (1 ⊗ f(λ − γh^{(1)}))`.
pub fn morphism_residual_at(
    f: &DynamicalMorphism,
    src: &Representation,
    dst: &Representation,
    s: &PointSample,
) -> Result<Check> {
    check_compatible(src, dst)?;
    if f.source().dim() != src.space().dim() || f.target().dim() != dst.space().dim() {
        return Err(Error::DimensionMismatch("morphism spaces do not match the representations".into()));
    }
    let step = src.step();
    let ambient_in = vec![src.auxiliary().clone(), src.space().clone()];
    let ambient_out = vec![src.auxiliary().clone(), dst.space().clone()];
    let lam = &s.lambda;
    let lw = src.l_operator().eval_checked(s.u, lam)?;
    let lu = dst.l_operator().eval_checked(s.u, lam)?;
    let f_now = embed(|l| f.eval(l), &ambient_in, &ambient_out, &[1], &[], lam, step)?;
    let f_shifted = embed(|l| f.eval(l), &ambient_in, &ambient_out, &[1], &[0], lam, step)?;
    let lhs: CMatrix = f_now * &lw;
    let rhs: CMatrix = &lu * f_shifted;
    Ok(Check {
        residual: max_entry_distance(&lhs, &rhs),
        condition: condition_number(&lw).max(condition_number(&lu)),
    })
}

pub fn morphism_residual(
    f: &DynamicalMorphism,
    src: &Representation,
    dst: &Representation,
    samples: &[PointSample],
) -> Result<f64> {
    samples
        .iter()
        .try_fold(0.0_f64, |acc, s| Ok(acc.max(morphism_residual_at(f, src, dst, s)?.residual)))
}
