//! Weighted spaces, weight-graded dynamical operators and the shifted
//! evaluation `λ − γh^{(k)}`.
//!
//! A [`DynamicalOperator`] is an evaluation callable `(u, λ) ↦ matrix` acting
//! on the tensor product of its factor spaces. Placing it on some slots of a
//! larger tensor product while shifting `λ` by `γ` times the weight of other
//! slots is done by [`embed`]; every equation in the crate is assembled from it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{join_index, split_index, try_inverse, CMatrix, ONE, ZERO};
use crate::sampling::PointSample;

pub type Weight = Vec<Complex64>;

/// Entrywise tolerance for comparing weights.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

pub fn same_weight(a: &[Complex64], b: &[Complex64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= WEIGHT_TOLERANCE)
}

/// Finite-dimensional space with a weight attached to each basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSpace {
    rank: usize,
    weights: Vec<Weight>,
}

impl WeightedSpace {
    pub fn new(rank: usize, weights: Vec<Weight>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("weighted space must have positive dimension".into()));
        }
        if let Some(bad) = weights.iter().find(|w| w.len() != rank) {
            return Err(Error::DimensionMismatch(format!(
                "weight of length {} in a space of rank {rank}",
                bad.len()
            )));
        }
        Ok(Self { rank, weights })
    }

    /// `C^n` with the standard basis vectors of the dual Cartan as weights.
    pub fn standard(n: usize) -> Self {
        let weights = (0..n)
            .map(|m| (0..n).map(|i| if i == m { ONE } else { ZERO }).collect())
            .collect();
        Self { rank: n, weights }
    }

    /// `dim`-dimensional space on which the Cartan acts by zero.
    pub fn trivial(dim: usize, rank: usize) -> Self {
        Self {
            rank,
            weights: vec![vec![ZERO; rank]; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight(&self, index: usize) -> &[Complex64] {
        &self.weights[index]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn is_trivial(&self) -> bool {
        self.weights.iter().flatten().all(|w| w.norm() <= WEIGHT_TOLERANCE)
    }

    /// Tensor product in the lexicographic basis; weights add.
    pub fn tensor(&self, other: &WeightedSpace) -> Result<WeightedSpace> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch(format!(
                "tensoring spaces of rank {} and {}",
                self.rank, other.rank
            )));
        }
        let weights = self
            .weights
            .iter()
            .flat_map(|a| other.weights.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect()))
            .collect();
        Ok(WeightedSpace {
            rank: self.rank,
            weights,
        })
    }
}

fn total_dim(spaces: &[WeightedSpace]) -> usize {
    spaces.iter().map(WeightedSpace::dim).product()
}

pub type OperatorFn = dyn Fn(Complex64, &[Complex64]) -> Result<CMatrix> + Send + Sync;
pub type SingularityFn = dyn Fn(Complex64, &[Complex64]) -> bool + Send + Sync;
pub type MorphismFn = dyn Fn(&[Complex64]) -> Result<CMatrix> + Send + Sync;

/// Meromorphic `(u, λ) ↦ End(⊗ factors)` with step `γ`.
#[derive(Clone)]
pub struct DynamicalOperator {
    factors: Vec<WeightedSpace>,
    step: Complex64,
    eval: Arc<OperatorFn>,
    singular: Option<Arc<SingularityFn>>,
}

impl fmt::Debug for DynamicalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalOperator")
            .field("dims", &self.factors.iter().map(WeightedSpace::dim).collect::<Vec<_>>())
            .field("step", &self.step)
            .field("declared_singularities", &self.singular.is_some())
            .finish()
    }
}

impl DynamicalOperator {
    pub fn new<F>(factors: Vec<WeightedSpace>, step: Complex64, eval: F) -> Result<Self>
    where
        F: Fn(Complex64, &[Complex64]) -> Result<CMatrix> + Send + Sync + 'static,
    {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("operator needs at least one factor".into()));
        }
        let rank = factors[0].rank();
        if factors.iter().any(|s| s.rank() != rank) {
            return Err(Error::DimensionMismatch("factor spaces of different rank".into()));
        }
        Ok(Self {
            factors,
            step,
            eval: Arc::new(eval),
            singular: None,
        })
    }

    pub fn constant(factors: Vec<WeightedSpace>, step: Complex64, matrix: CMatrix) -> Result<Self> {
        let dim = total_dim(&factors);
        if matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "constant operator of shape {:?} on a space of dimension {dim}",
                matrix.shape()
            )));
        }
        Self::new(factors, step, move |_, _| Ok(matrix.clone()))
    }

    pub fn identity(factors: Vec<WeightedSpace>, step: Complex64) -> Result<Self> {
        let dim = total_dim(&factors);
        Self::constant(factors, step, CMatrix::identity(dim, dim))
    }

    /// Attach a predicate flagging evaluation points too close to a pole.
    pub fn with_singularity<P>(mut self, predicate: P) -> Self
    where
        P: Fn(Complex64, &[Complex64]) -> bool + Send + Sync + 'static,
    {
        self.singular = Some(Arc::new(predicate));
        self
    }

    pub(crate) fn with_singularity_arc(mut self, predicate: Option<Arc<SingularityFn>>) -> Self {
        self.singular = predicate;
        self
    }

    pub(crate) fn singularity(&self) -> Option<Arc<SingularityFn>> {
        self.singular.clone()
    }

    pub fn factors(&self) -> &[WeightedSpace] {
        &self.factors
    }

    pub fn step(&self) -> Complex64 {
        self.step
    }

    pub fn rank(&self) -> usize {
        self.factors[0].rank()
    }

    pub fn dim(&self) -> usize {
        total_dim(&self.factors)
    }

    pub fn is_near_singular(&self, u: Complex64, lambda: &[Complex64]) -> bool {
        self.singular.as_ref().is_some_and(|p| p(u, lambda))
    }

    /// Plain evaluation; declared singular neighbourhoods are not consulted.
    pub fn eval(&self, u: Complex64, lambda: &[Complex64]) -> Result<CMatrix> {
        if lambda.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "lambda of length {} for an operator of rank {}",
                lambda.len(),
                self.rank()
            )));
        }
        let m = (self.eval)(u, lambda)?;
        let dim = self.dim();
        if m.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "evaluation returned shape {:?}, expected {dim}x{dim}",
                m.shape()
            )));
        }
        Ok(m)
    }

    /// Evaluation that refuses points inside a declared singular neighbourhood.
    pub fn eval_checked(&self, u: Complex64, lambda: &[Complex64]) -> Result<CMatrix> {
        if self.is_near_singular(u, lambda) {
            return Err(Error::NearSingular(format!("operator at u = {u}")));
        }
        self.eval(u, lambda)
    }

    /// Largest modulus of an entry connecting basis tensors of different total weight.
    pub fn weight_defect(&self, u: Complex64, lambda: &[Complex64]) -> Result<f64> {
        let m = self.eval(u, lambda)?;
        Ok(total_weight_violation(&m, &self.factors, &self.factors))
    }
}

/// Meromorphic `λ ↦ Hom(source, target)`.
#[derive(Clone)]
pub struct DynamicalMorphism {
    source: WeightedSpace,
    target: WeightedSpace,
    eval: Arc<MorphismFn>,
}

impl fmt::Debug for DynamicalMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalMorphism")
            .field("source_dim", &self.source.dim())
            .field("target_dim", &self.target.dim())
            .finish()
    }
}

impl DynamicalMorphism {
    pub fn new<F>(source: WeightedSpace, target: WeightedSpace, eval: F) -> Result<Self>
    where
        F: Fn(&[Complex64]) -> Result<CMatrix> + Send + Sync + 'static,
    {
        if source.rank() != target.rank() {
            return Err(Error::DimensionMismatch("morphism between spaces of different rank".into()));
        }
        Ok(Self {
            source,
            target,
            eval: Arc::new(eval),
        })
    }

    pub fn constant(source: WeightedSpace, target: WeightedSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (target.dim(), source.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "constant morphism of shape {:?}, expected {}x{}",
                matrix.shape(),
                target.dim(),
                source.dim()
            )));
        }
        Self::new(source, target, move |_| Ok(matrix.clone()))
    }

    pub fn identity(space: WeightedSpace) -> Self {
        let dim = space.dim();
        Self::constant(space.clone(), space, CMatrix::identity(dim, dim)).expect("square identity")
    }

    pub fn source(&self) -> &WeightedSpace {
        &self.source
    }

    pub fn target(&self) -> &WeightedSpace {
        &self.target
    }

    pub fn eval(&self, lambda: &[Complex64]) -> Result<CMatrix> {
        if lambda.len() != self.source.rank() {
            return Err(Error::DimensionMismatch(format!(
                "lambda of length {} for a morphism of rank {}",
                lambda.len(),
                self.source.rank()
            )));
        }
        let m = (self.eval)(lambda)?;
        if m.shape() != (self.target.dim(), self.source.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "morphism evaluated to shape {:?}",
                m.shape()
            )));
        }
        Ok(m)
    }

    /// `then ∘ self`, evaluated pointwise in `λ`.
    pub fn then(&self, then: &DynamicalMorphism) -> Result<DynamicalMorphism> {
        if then.source.dim() != self.target.dim() {
            return Err(Error::DimensionMismatch("composing morphisms with mismatched spaces".into()));
        }
        let (f, g) = (self.clone(), then.clone());
        DynamicalMorphism::new(self.source.clone(), then.target.clone(), move |l| {
            Ok(g.eval(l)? * f.eval(l)?)
        })
    }

    /// Pointwise inverse; requires a square, invertible value.
    pub fn inverse(&self) -> Result<DynamicalMorphism> {
        if self.source.dim() != self.target.dim() {
            return Err(Error::DimensionMismatch("inverting a non-square morphism".into()));
        }
        let f = self.clone();
        DynamicalMorphism::new(self.target.clone(), self.source.clone(), move |l| {
            try_inverse(&f.eval(l)?, "morphism value")
        })
    }

    /// Largest modulus of a weight-changing entry of `f(λ)`.
    pub fn equivariance_defect(&self, lambda: &[Complex64]) -> Result<f64> {
        let m = self.eval(lambda)?;
        Ok(off_weight_mass(
            &m,
            std::slice::from_ref(&self.source),
            std::slice::from_ref(&self.target),
        ))
    }
}

/// Place a block operator on the `acting` slots of a tensor product, shifting
/// `λ` by `step` times the total weight of the `shift` slots.
///
/// `block(λ')` must return a matrix from `⊗_{a∈acting} ambient_in[a]` to
/// `⊗_{a∈acting} ambient_out[a]`, both in the order listed in `acting`. All
/// other slots carry the identity, so their in and out spaces must agree. The
/// block is evaluated once per basis index of the shift slots, at
/// `λ − step·μ` where `μ` is that basis tensor's weight.
pub fn embed<F>(
    mut block: F,
    ambient_in: &[WeightedSpace],
    ambient_out: &[WeightedSpace],
    acting: &[usize],
    shift: &[usize],
    lambda: &[Complex64],
    step: Complex64,
) -> Result<CMatrix>
where
    F: FnMut(&[Complex64]) -> Result<CMatrix>,
{
    let slots = ambient_in.len();
    if ambient_out.len() != slots {
        return Err(Error::DimensionMismatch("ambient in/out slot counts differ".into()));
    }
    let mut is_acting = vec![false; slots];
    for &a in acting {
        if a >= slots || is_acting[a] {
            return Err(Error::InvalidParameter(format!("invalid acting slot {a}")));
        }
        is_acting[a] = true;
    }
    for &s in shift {
        if s >= slots || is_acting[s] {
            return Err(Error::InvalidParameter(format!(
                "shift slot {s} must be a valid slot outside the acting slots"
            )));
        }
    }
    for k in 0..slots {
        if !is_acting[k] && ambient_in[k].dim() != ambient_out[k].dim() {
            return Err(Error::DimensionMismatch(format!("identity slot {k} changes dimension")));
        }
        if ambient_in[k].rank() != lambda.len() || ambient_out[k].rank() != lambda.len() {
            return Err(Error::DimensionMismatch(format!("slot {k} rank differs from lambda")));
        }
    }

    let dims_in: Vec<usize> = ambient_in.iter().map(WeightedSpace::dim).collect();
    let dims_out: Vec<usize> = ambient_out.iter().map(WeightedSpace::dim).collect();
    let act_in: Vec<usize> = acting.iter().map(|&a| dims_in[a]).collect();
    let act_out: Vec<usize> = acting.iter().map(|&a| dims_out[a]).collect();
    let block_shape = (act_out.iter().product::<usize>(), act_in.iter().product::<usize>());

    let total_in = dims_in.iter().product::<usize>();
    let total_out = dims_out.iter().product::<usize>();
    let mut out = CMatrix::zeros(total_out, total_in);

    let mut cache: BTreeMap<Vec<usize>, CMatrix> = BTreeMap::new();
    let mut idx = vec![0; slots];
    let mut out_idx = vec![0; slots];
    let mut sub_in = vec![0; acting.len()];
    let mut sub_out = vec![0; acting.len()];

    for col in 0..total_in {
        split_index(col, &dims_in, &mut idx);
        let key: Vec<usize> = shift.iter().map(|&s| idx[s]).collect();
        if !cache.contains_key(&key) {
            let mut shifted = lambda.to_vec();
            for &s in shift {
                for (l, w) in shifted.iter_mut().zip(ambient_in[s].weight(idx[s])) {
                    *l -= step * w;
                }
            }
            let m = block(&shifted)?;
            if m.shape() != block_shape {
                return Err(Error::DimensionMismatch(format!(
                    "block of shape {:?}, expected {:?}",
                    m.shape(),
                    block_shape
                )));
            }
            cache.insert(key.clone(), m);
        }
        let m = &cache[&key];

        for (k, &a) in acting.iter().enumerate() {
            sub_in[k] = idx[a];
        }
        let bc = join_index(&sub_in, &act_in);
        for br in 0..block_shape.0 {
            let v = m[(br, bc)];
            if v == ZERO {
                continue;
            }
            split_index(br, &act_out, &mut sub_out);
            out_idx.copy_from_slice(&idx);
            for (k, &a) in acting.iter().enumerate() {
                out_idx[a] = sub_out[k];
            }
            out[(join_index(&out_idx, &dims_out), col)] += v;
        }
    }
    Ok(out)
}

/// `F^{acting}(u, λ − γh^{(shift)})` on the tensor product `ambient`.
pub fn shifted_eval(
    op: &DynamicalOperator,
    u: Complex64,
    lambda: &[Complex64],
    acting: &[usize],
    shift: &[usize],
    ambient: &[WeightedSpace],
) -> Result<CMatrix> {
    check_placement(op.factors(), ambient, acting)?;
    embed(|l| op.eval_checked(u, l), ambient, ambient, acting, shift, lambda, op.step())
}

fn check_placement(factors: &[WeightedSpace], ambient: &[WeightedSpace], acting: &[usize]) -> Result<()> {
    if factors.len() != acting.len() {
        return Err(Error::DimensionMismatch(format!(
            "operator has {} factors but is placed on {} slots",
            factors.len(),
            acting.len()
        )));
    }
    for (f, &a) in factors.iter().zip(acting) {
        let slot = ambient
            .get(a)
            .ok_or_else(|| Error::InvalidParameter(format!("slot {a} out of range")))?;
        if slot.dim() != f.dim() {
            return Err(Error::DimensionMismatch(format!("slot {a} has the wrong dimension")));
        }
    }
    Ok(())
}

/// Largest modulus of an entry of `a` whose row and column basis tensors differ
/// in the weight of at least one slot.
pub fn off_weight_mass(a: &CMatrix, slots_in: &[WeightedSpace], slots_out: &[WeightedSpace]) -> f64 {
    let dims_in: Vec<usize> = slots_in.iter().map(WeightedSpace::dim).collect();
    let dims_out: Vec<usize> = slots_out.iter().map(WeightedSpace::dim).collect();
    let mut ci = vec![0; dims_in.len()];
    let mut ri = vec![0; dims_out.len()];
    let mut worst = 0.0_f64;
    for col in 0..a.ncols() {
        split_index(col, &dims_in, &mut ci);
        for row in 0..a.nrows() {
            let v = a[(row, col)].norm();
            if v <= worst {
                continue;
            }
            split_index(row, &dims_out, &mut ri);
            let preserved = (0..ci.len()).all(|k| same_weight(slots_in[k].weight(ci[k]), slots_out[k].weight(ri[k])));
            if !preserved {
                worst = v;
            }
        }
    }
    worst
}

/// Like [`off_weight_mass`] but only the total weight of the tensor must agree.
pub fn total_weight_violation(a: &CMatrix, slots_in: &[WeightedSpace], slots_out: &[WeightedSpace]) -> f64 {
    let total = |slots: &[WeightedSpace]| -> WeightedSpace {
        slots
            .iter()
            .skip(1)
            .fold(slots[0].clone(), |acc, s| acc.tensor(s).expect("equal ranks"))
    };
    off_weight_mass(a, &[total(slots_in)], &[total(slots_out)])
}

/// Whether `a` on `V ⊗ W` preserves the weight of each slot separately.
pub fn zero_weight_in_each_component(a: &CMatrix, v: &WeightedSpace, w: &WeightedSpace, tol: f64) -> bool {
    let slots = [v.clone(), w.clone()];
    off_weight_mass(a, &slots, &slots) <= tol
}

/// Off-weight mass of `L_U(u,λ)^{-1} (1 ⊗ A) L_W(u,λ)`, maximised over samples.
///
/// `A` maps `W` to `U`; both L-operators act on `V ⊗ W` resp. `V ⊗ U` with the
/// same auxiliary `V`.
pub fn intertwiner_criterion_residual(
    a: &CMatrix,
    l_w: &DynamicalOperator,
    l_u: &DynamicalOperator,
    samples: &[PointSample],
) -> Result<f64> {
    let (v, w) = two_factors(l_w)?;
    let (v2, u_space) = two_factors(l_u)?;
    if v.dim() != v2.dim() {
        return Err(Error::DimensionMismatch("L-operators with different auxiliary spaces".into()));
    }
    if a.shape() != (u_space.dim(), w.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "A has shape {:?}, expected {}x{}",
            a.shape(),
            u_space.dim(),
            w.dim()
        )));
    }
    let one_a = CMatrix::identity(v.dim(), v.dim()).kronecker(a);
    let mut worst = 0.0_f64;
    for s in samples {
        let lw = l_w.eval_checked(s.u, &s.lambda)?;
        let lu_inv = try_inverse(&l_u.eval_checked(s.u, &s.lambda)?, "L_U at sample")?;
        let m = lu_inv * &one_a * lw;
        worst = worst.max(off_weight_mass(&m, &[v.clone(), w.clone()], &[v.clone(), u_space.clone()]));
    }
    Ok(worst)
}

pub(crate) fn two_factors(op: &DynamicalOperator) -> Result<(WeightedSpace, WeightedSpace)> {
    match op.factors() {
        [a, b] => Ok((a.clone(), b.clone())),
        f => Err(Error::DimensionMismatch(format!(
            "expected an operator on two factors, got {}",
            f.len()
        ))),
    }
}
