use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, cpow, frobenius_norm, identity, kron, max_entry_distance, max_entry_norm, try_inverse, CMatrix, ONE, ZERO};

use super::germ::AnalyticGerm;
use super::series::{scalar_series_div, MatrixSeries};
use super::solver::{seed_residual, solve_difference_with, SolveOptions};

/// Tolerance for `R(0)` being a fixed point of the crossing map.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-9;

/// Transpose in the first tensor factor of `V ⊗ W`:
/// `X^{t₁}[(i',j),(i,j')] = X[(i,j),(i',j')]`.
pub fn partial_transpose(x: &CMatrix, dv: usize, dw: usize) -> Result<CMatrix> {
    if x.shape() != (dv * dw, dv * dw) {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose of a {:?} matrix on {dv}x{dw}",
            x.shape()
        )));
    }
    Ok(CMatrix::from_fn(dv * dw, dv * dw, |r, col| {
        let (i2, j) = (r / dw, r % dw);
        let (i, j2) = (col / dw, col % dw);
        x[(i * dw + j, i2 * dw + j2)]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `R(pz) = crossing_map(R(z))` with `p = q^{2mh∨}`.
    Forward,
    /// `R(pz) = crossing_map^{-1}(R(z))` with `p = q^{-2mh∨}`.
    Inverse,
}

#[derive(Debug, Clone)]
pub struct CrossingParams {
    q: Complex64,
    m: u32,
    hvee: u32,
    rho: Vec<Complex64>,
    dw: usize,
}

impl CrossingParams {
    /// `rho[i]` is the pairing of `ρ` with the weight of the i-th basis
    /// vector of `V`, so `q^{2ρ}` acts on `V` as `diag(q^{2ρ_i})`.
    pub fn new(q: Complex64, m: u32, hvee: u32, rho: Vec<Complex64>, dw: usize) -> Result<Self> {
        if rho.is_empty() || dw == 0 {
            return Err(Error::InvalidParameter("crossing needs nonempty V and W".into()));
        }
        if m == 0 || hvee == 0 {
            return Err(Error::InvalidParameter("m and h∨ must be positive".into()));
        }
        if q == ZERO || !q.is_finite() {
            return Err(Error::InvalidParameter("q must be finite and nonzero".into()));
        }
        let r = cpow(q, c(2.0 * (m * hvee) as f64, 0.0));
        if (r.norm() - 1.0).abs() < 1e-12 {
            return Err(Error::InvalidParameter("|q^{2mh∨}| = 1 gives no contracting orientation".into()));
        }
        Ok(Self { q, m, hvee, rho, dw })
    }

    pub fn dv(&self) -> usize {
        self.rho.len()
    }

    pub fn dw(&self) -> usize {
        self.dw
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn hvee(&self) -> u32 {
        self.hvee
    }

    fn shift(&self) -> Complex64 {
        cpow(self.q, c(2.0 * (self.m * self.hvee) as f64, 0.0))
    }

    pub fn orientation(&self) -> Orientation {
        if self.shift().norm() > 1.0 {
            Orientation::Forward
        } else {
            Orientation::Inverse
        }
    }

    /// The dilation factor, always with `|p| > 1`.
    pub fn p(&self) -> Complex64 {
        match self.orientation() {
            Orientation::Forward => self.shift(),
            Orientation::Inverse => ONE / self.shift(),
        }
    }

    /// `q^{2sρ} ⊗ 1`.
    fn conjugator(&self, sign: f64) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dv(),
            self.rho.iter().map(|r| cpow(self.q, 2.0 * sign * r)),
        ));
        kron(&d, &identity(self.dw))
    }
}

fn g_map(x: &CMatrix, dv: usize, dw: usize) -> Result<CMatrix> {
    let a = try_inverse(x, "crossing: X")?;
    let b = try_inverse(&partial_transpose(&a, dv, dw)?, "crossing: (X^{-1})^{t1}")?;
    partial_transpose(&b, dv, dw)
}

fn g_inverse(y: &CMatrix, dv: usize, dw: usize) -> Result<CMatrix> {
    let a = try_inverse(&partial_transpose(y, dv, dw)?, "crossing inverse: Y^{t1}")?;
    try_inverse(&partial_transpose(&a, dv, dw)?, "crossing inverse: ((Y^{t1})^{-1})^{t1}")
}

/// `(q^{-2ρ}⊗1) (((X^{-1})^{t₁})^{-1})^{t₁} (q^{2ρ}⊗1)`.
pub fn crossing_map(x: &CMatrix, params: &CrossingParams) -> Result<CMatrix> {
    Ok(params.conjugator(-1.0) * g_map(x, params.dv(), params.dw)? * params.conjugator(1.0))
}

/// Inverse of [`crossing_map`]: undo the conjugation, then the transposes
/// and inversions in reverse order.
pub fn inverse_crossing_map(y: &CMatrix, params: &CrossingParams) -> Result<CMatrix> {
    g_inverse(&(params.conjugator(1.0) * y * params.conjugator(-1.0)), params.dv(), params.dw)
}

fn g_map_series(x: &MatrixSeries, dv: usize, dw: usize) -> Result<MatrixSeries> {
    x.inverse()?
        .try_map_linear(|m| partial_transpose(m, dv, dw))?
        .inverse()?
        .try_map_linear(|m| partial_transpose(m, dv, dw))
}

pub fn crossing_map_series(x: &MatrixSeries, params: &CrossingParams) -> Result<MatrixSeries> {
    let (l, r) = (params.conjugator(-1.0), params.conjugator(1.0));
    Ok(g_map_series(x, params.dv(), params.dw)?.map_linear(|m| &l * m * &r))
}

pub fn inverse_crossing_map_series(y: &MatrixSeries, params: &CrossingParams) -> Result<MatrixSeries> {
    let (l, r) = (params.conjugator(1.0), params.conjugator(-1.0));
    let (dv, dw) = (params.dv(), params.dw);
    y.map_linear(|m| &l * m * &r)
        .try_map_linear(|m| partial_transpose(m, dv, dw))?
        .inverse()?
        .try_map_linear(|m| partial_transpose(m, dv, dw))?
        .inverse()
}

/// The map `F` with `R(pz) = F(R(z))` for the chosen orientation.
pub fn oriented_map_series(x: &MatrixSeries, params: &CrossingParams) -> Result<MatrixSeries> {
    match params.orientation() {
        Orientation::Forward => crossing_map_series(x, params),
        Orientation::Inverse => inverse_crossing_map_series(x, params),
    }
}

pub fn oriented_map(x: &CMatrix, params: &CrossingParams) -> Result<CMatrix> {
    match params.orientation() {
        Orientation::Forward => crossing_map(x, params),
        Orientation::Inverse => inverse_crossing_map(x, params),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub p: Complex64,
    pub orientation: Orientation,
    pub fixed_point_residual: f64,
    /// Entry used to fit the scalar prefactor.
    pub pivot: (usize, usize),
    /// `s(z)` with `R(pz) = s(z)·F(R(z))` at the pivot entry.
    pub prefactor: Vec<Complex64>,
    /// `c(z)` with `c(0) = 1` and `c(pz)s(z) = c(z)`, so `cR` solves the
    /// equation without prefactor.
    pub normalizer: Vec<Complex64>,
    /// Index 0: fixed-point residual; index 1: residual of the seed equation
    /// `p R̂₁ = g₁ R̂₁`; index `k ≥ 2`: relative distance between the solved
    /// coefficient and `R̂_k`.
    pub order_residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Normalises `R` by the fitted scalar, solves the crossing equation from
/// `R(0)` and `R̂₁`, and compares the solution with `R̂ = cR` order by order.
pub fn verify_crossing_series(r: &MatrixSeries, params: &CrossingParams) -> Result<CrossingReport> {
    let d = params.dv() * params.dw();
    if r.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!("series of shape {:?} on a space of dimension {d}", r.shape())));
    }
    let order = r.order();
    let p = params.p();
    let r0 = r.coeff(0).clone();
    let fixed_point_residual = max_entry_distance(&oriented_map(&r0, params)?, &r0) / max_entry_norm(&r0).max(1.0);
    if !(fixed_point_residual <= FIXED_POINT_TOLERANCE) {
        return Err(Error::NotFixedPoint {
            residual: fixed_point_residual,
        });
    }

    let image = oriented_map_series(r, params)?;
    let pivot = image
        .coeff(0)
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(idx, _)| (idx % d, idx / d))
        .expect("nonempty matrix");
    let prefactor = scalar_series_div(&r.dilate(p).entry(pivot.0, pivot.1), &image.entry(pivot.0, pivot.1))?;

    let mut normalizer = vec![ZERO; order + 1];
    normalizer[0] = ONE;
    let mut pk = ONE;
    for k in 1..=order {
        pk *= p;
        let mut acc = ZERO;
        for j in 1..=k {
            acc += prefactor[j] * p.powu((k - j) as u32) * normalizer[k - j];
        }
        let den = pk * prefactor[0] - ONE;
        if den.norm() < 1e-14 * pk.norm() {
            return Err(Error::Resonance {
                order: k,
                norm: f64::INFINITY,
                threshold: 0.0,
            });
        }
        normalizer[k] = -acc / den;
    }
    let normalized = r.scalar_mul(&normalizer)?;

    let map_params = params.clone();
    let germ = AnalyticGerm::from_map_at_fixed_point(
        move |x: &MatrixSeries| oriented_map_series(x, &map_params),
        r0,
        FIXED_POINT_TOLERANCE,
    )?;
    let mut order_residuals = vec![fixed_point_residual];
    if order >= 1 {
        let seed = normalized.coeff(1).clone();
        order_residuals.push(seed_residual(&germ, p, &seed));
        let opts = SolveOptions {
            check_seed: false,
            ..SolveOptions::default()
        };
        let solved = solve_difference_with(&germ, p, order, &seed, opts)?;
        for k in 2..=order {
            let target = normalized.coeff(k);
            order_residuals.push(frobenius_norm(&(solved.coeff(k) - target)) / frobenius_norm(target).max(1.0));
        }
    }
    let max_residual = order_residuals.iter().copied().fold(0.0, f64::max);
    Ok(CrossingReport {
        p,
        orientation: params.orientation(),
        fixed_point_residual,
        pivot,
        prefactor,
        normalizer,
        order_residuals,
        max_residual,
    })
}

fn unit(i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(i, j)] = ONE;
    m
}

/// Trigonometric `R(z)` on `ℂ² ⊗ ℂ²`, linear in `z`:
/// `(q − z/q) Σ E_ii⊗E_ii + (1 − z) Σ_{i≠j} E_ii⊗E_jj + (q − 1/q)(E_12⊗E_21 + z E_21⊗E_12)`.
pub fn trigonometric_gl2(q: Complex64, z: Complex64) -> CMatrix {
    let diag = kron(&unit(0, 0), &unit(0, 0)) + kron(&unit(1, 1), &unit(1, 1));
    let off = kron(&unit(0, 0), &unit(1, 1)) + kron(&unit(1, 1), &unit(0, 0));
    diag * (q - z / q) + off * (ONE - z) + (kron(&unit(0, 1), &unit(1, 0)) + kron(&unit(1, 0), &unit(0, 1)) * z) * (q - ONE / q)
}

/// [`trigonometric_gl2`] as a series in `z` padded to `order`.
pub fn trigonometric_gl2_series(q: Complex64, order: usize) -> Result<MatrixSeries> {
    let r0 = trigonometric_gl2(q, ZERO);
    let r1 = trigonometric_gl2(q, ONE) - &r0;
    MatrixSeries::from_polynomial(vec![r0, r1], order)
}

/// Crossing data of the gl₂ vector representation: `m = 1`, `h∨ = 2`,
/// `ρ` pairing to `±1/2` with the two basis weights.
pub fn gl2_crossing_params(q: Complex64) -> Result<CrossingParams> {
    CrossingParams::new(q, 1, 2, vec![c(0.5, 0.0), c(-0.5, 0.0)], 2)
}

/// Largest `‖R₁₂(z₁/z₂)R₁₃(z₁/z₃)R₂₃(z₂/z₃) − R₂₃R₁₃R₁₂‖` over the triples,
/// for `R` on `ℂ^d ⊗ ℂ^d`.
pub fn ybe_residual<F>(r: F, d: usize, triples: &[[Complex64; 3]]) -> Result<f64>
where
    F: Fn(Complex64) -> Result<CMatrix>,
{
    let id = identity(d);
    let swap23 = kron(&id, &crate::linalg::flip(d));
    let mut worst = 0.0_f64;
    for [z1, z2, z3] in triples {
        let r12 = kron(&r(z1 / z2)?, &id);
        let r13 = &swap23 * kron(&r(z1 / z3)?, &id) * &swap23;
        let r23 = kron(&id, &r(z2 / z3)?);
        let lhs = &r12 * &r13 * &r23;
        let rhs = &r23 * &r13 * &r12;
        worst = worst.max(max_entry_distance(&lhs, &rhs) / max_entry_norm(&lhs).max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))) + identity(n) * c(2.0, 0.0)
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_invertible(&mut rng, 6);
        let t = partial_transpose(&x, 2, 3).unwrap();
        assert_eq!(partial_transpose(&t, 2, 3).unwrap(), x);
        // E_12 ⊗ E_ab ↦ E_21 ⊗ E_ab
        let e = kron(&unit(0, 1), &unit(1, 0));
        assert_eq!(partial_transpose(&e, 2, 2).unwrap(), kron(&unit(1, 0), &unit(1, 0)));
    }

    #[test]
    fn identity_is_fixed() {
        let params = gl2_crossing_params(c(1.3, 0.2)).unwrap();
        assert!(max_entry_distance(&crossing_map(&identity(4), &params).unwrap(), &identity(4)) < 1e-15);
    }

    #[test]
    fn map_and_inverse_are_mutually_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = gl2_crossing_params(c(1.3, 0.2)).unwrap();
        for _ in 0..20 {
            let x = random_invertible(&mut rng, 4);
            let back = inverse_crossing_map(&crossing_map(&x, &params).unwrap(), &params).unwrap();
            assert!(max_entry_distance(&back, &x) < 1e-12);
            let fwd = crossing_map(&inverse_crossing_map(&x, &params).unwrap(), &params).unwrap();
            assert!(max_entry_distance(&fwd, &x) < 1e-12);
        }
    }

    #[test]
    fn diagonal_image_in_closed_form() {
        // X = Σ x_{ij} E_ii⊗E_jj is diagonal, so partial transposes fix it and
        // G(X) = X; conjugation by a diagonal also fixes it.
        let q = c(0.8, 0.1);
        let params = gl2_crossing_params(q).unwrap();
        let x = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            cpow(q, c(1.0, 0.0)),
            cpow(q, c(-1.0, 0.0)),
            cpow(q, c(-1.0, 0.0)),
            cpow(q, c(1.0, 0.0)),
        ]));
        assert!(max_entry_distance(&crossing_map(&x, &params).unwrap(), &x) < 1e-14);
        // off-diagonal E_12⊗E_21 block: (I + t E_12⊗E_21)^{-1} = I − t E_12⊗E_21,
        // its t₁ is I − t E_21⊗E_21, inverse I + t E_21⊗E_21, t₁ back gives
        // I + t E_12⊗E_21; conjugating scales it by q^{-2ρ_1 + 2ρ_2} = q^{-2}
        let t = c(0.3, -0.2);
        let y = identity(4) + kron(&unit(0, 1), &unit(1, 0)) * t;
        let expected = identity(4) + kron(&unit(0, 1), &unit(1, 0)) * (t * cpow(q, c(-2.0, 0.0)));
        assert!(max_entry_distance(&crossing_map(&y, &params).unwrap(), &expected) < 1e-14);
    }

    #[test]
    fn series_map_matches_pointwise_map() {
        let q = c(1.4, 0.0);
        let params = gl2_crossing_params(q).unwrap();
        let series = trigonometric_gl2_series(q, 10).unwrap();
        let image = crossing_map_series(&series, &params).unwrap();
        let z = c(0.01, 0.005);
        let mut sum = CMatrix::zeros(4, 4);
        for k in (0..=10).rev() {
            sum = sum * z + image.coeff(k);
        }
        let direct = crossing_map(&trigonometric_gl2(q, z), &params).unwrap();
        assert!(max_entry_distance(&sum, &direct) < 1e-12);
    }

    #[test]
    fn fixture_satisfies_yang_baxter() {
        let q = c(1.4, 0.3);
        let triples = [[c(0.3, 0.1), c(1.9, -0.2), c(0.7, 0.4)], [c(2.0, 0.0), c(-0.5, 1.0), c(0.1, 0.9)]];
        let res = ybe_residual(|z| Ok(trigonometric_gl2(q, z)), 2, &triples).unwrap();
        assert!(res < 1e-13);
        // a sign flip in the β entries breaks it
        let broken = ybe_residual(
            |z| {
                let mut m = trigonometric_gl2(q, z);
                m[(1, 2)] = -m[(1, 2)];
                Ok(m)
            },
            2,
            &triples,
        )
        .unwrap();
        assert!(broken > 1e-3);
    }

    #[test]
    fn orientation_follows_modulus() {
        let fwd = gl2_crossing_params(c(1.5, 0.0)).unwrap();
        assert_eq!(fwd.orientation(), Orientation::Forward);
        assert!((fwd.p() - c(1.5f64.powi(4), 0.0)).norm() < 1e-12);
        let inv = gl2_crossing_params(c(0.5, 0.0)).unwrap();
        assert_eq!(inv.orientation(), Orientation::Inverse);
        assert!((inv.p() - c(16.0, 0.0)).norm() < 1e-12);
        assert!(gl2_crossing_params(c(0.0, 1.0)).is_err());
    }

    #[test]
    fn constant_fixed_series_has_zero_residual() {
        for q in [c(1.5, 0.0), c(0.6, 0.1)] {
            let params = gl2_crossing_params(q).unwrap();
            let r0 = trigonometric_gl2(q, ZERO);
            let report = verify_crossing_series(&MatrixSeries::constant(r0, 8), &params).unwrap();
            assert!(report.max_residual < 1e-12, "{report:?}");
        }
    }

    #[test]
    fn fixture_series_solves_crossing() {
        for q in [c(1.5, 0.0), c(0.6, 0.1)] {
            let params = gl2_crossing_params(q).unwrap();
            let series = trigonometric_gl2_series(q, 8).unwrap();
            let report = verify_crossing_series(&series, &params).unwrap();
            assert!(report.max_residual <= 1e-8, "{:?}", report.order_residuals);
            assert!((report.prefactor[0] - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn dilated_fixture_still_solves() {
        // R(1.1z) solves the same equation, so scaling R₁ alone is invisible
        let q = c(1.5, 0.0);
        let params = gl2_crossing_params(q).unwrap();
        let mut series = trigonometric_gl2_series(q, 8).unwrap();
        let r1 = series.coeff(1) * c(1.1, 0.0);
        series.set_coeff(1, r1).unwrap();
        assert!(verify_crossing_series(&series, &params).unwrap().max_residual < 1e-12);
    }

    #[test]
    fn perturbed_fixture_is_flagged() {
        let q = c(1.5, 0.0);
        let params = gl2_crossing_params(q).unwrap();
        let series = trigonometric_gl2_series(q, 8).unwrap();
        let normalizer = verify_crossing_series(&series, &params).unwrap().normalizer;
        let normalized = series.scalar_mul(&normalizer).unwrap();
        let clean = verify_crossing_series(&normalized, &params).unwrap();
        assert!(clean.max_residual < 1e-10, "{:?}", clean.order_residuals);
        for k in [2, 3, 5] {
            let mut bad = normalized.clone();
            bad.set_coeff(k, normalized.coeff(k) * c(1.1, 0.0)).unwrap();
            let report = verify_crossing_series(&bad, &params).unwrap();
            assert!(report.order_residuals[k] > 1e-4, "order {k}: {:?}", report.order_residuals);
            assert!(report.order_residuals[..k].iter().all(|r| *r < 1e-10));
        }
    }

    #[test]
    fn non_fixed_constant_term_is_rejected() {
        let params = gl2_crossing_params(c(1.5, 0.0)).unwrap();
        let mut m = identity(4);
        m[(1, 2)] = ONE;
        let series = MatrixSeries::constant(m, 3);
        assert!(matches!(verify_crossing_series(&series, &params), Err(Error::NotFixedPoint { .. })));
    }
}
