use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, identity, operator_norm, try_inverse, CMatrix};

use super::germ::{unvectorize, vectorize, AnalyticGerm};
use super::series::MatrixSeries;

/// Largest resolvent norm `‖(p^k − g₁)^{-1}‖` accepted before reporting resonance.
pub const RESONANCE_THRESHOLD: f64 = 1e12;

/// Relative tolerance on the seed equation `p f₁ = g₁ f₁`.
pub const SEED_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Order by order: `f_k` from `f_1 … f_{k−1}`.
    #[default]
    Recursive,
    /// Jacobi sweeps updating every coefficient from the previous iterate;
    /// exact after `N − 1` sweeps.
    FixedPointSweep,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub resonance_threshold: f64,
    /// Reject seeds violating `p f₁ = g₁ f₁`.
    pub check_seed: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Recursive,
            resonance_threshold: RESONANCE_THRESHOLD,
            check_seed: true,
        }
    }
}

/// `(p^k − g₁)^{-1}` with its operator norm.
pub fn resolvent(g1: &CMatrix, p: Complex64, k: usize) -> Result<(CMatrix, f64)> {
    let m = identity(g1.nrows()) * p.powu(k as u32) - g1;
    match try_inverse(&m, "resolvent") {
        Ok(inv) => {
            let norm = operator_norm(&inv);
            Ok((inv, norm))
        }
        Err(_) => Ok((CMatrix::zeros(g1.nrows(), g1.ncols()), f64::INFINITY)),
    }
}

/// `‖p f₁ − g₁ f₁‖ / max(1, |p| ‖f₁‖)`.
pub fn seed_residual(germ: &AnalyticGerm, p: Complex64, seed: &CMatrix) -> f64 {
    let lhs = seed * p;
    frobenius_norm(&(lhs - germ.apply_linear(seed))) / (p.norm() * frobenius_norm(seed)).max(1.0)
}

pub fn solve_difference(germ: &AnalyticGerm, p: Complex64, order: usize, seed: &CMatrix) -> Result<MatrixSeries> {
    solve_difference_with(germ, p, order, seed, SolveOptions::default())
}

/// Formal solution `f ∈ z·M[[z]]` of `f(pz) = G(f(z))` through `order`,
/// with `f₁ = seed`.
pub fn solve_difference_with(
    germ: &AnalyticGerm,
    p: Complex64,
    order: usize,
    seed: &CMatrix,
    opts: SolveOptions,
) -> Result<MatrixSeries> {
    if !(p.norm() > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("solver needs |p| > 1, got {p}")));
    }
    let (rows, cols) = germ.shape();
    if seed.shape() != (rows, cols) {
        return Err(Error::DimensionMismatch(format!("seed of shape {:?} for {:?}", seed.shape(), (rows, cols))));
    }
    if order == 0 {
        return Ok(MatrixSeries::zeros(rows, cols, 0));
    }
    if opts.check_seed {
        let residual = seed_residual(germ, p, seed);
        if !(residual <= SEED_TOLERANCE) {
            return Err(Error::SeedInconsistent { residual });
        }
    }
    let mut resolvents = Vec::with_capacity(order + 1);
    resolvents.push(None);
    resolvents.push(None);
    for k in 2..=order {
        let (inv, norm) = resolvent(germ.linear_part(), p, k)?;
        if !(norm <= opts.resonance_threshold) {
            return Err(Error::Resonance {
                order: k,
                norm,
                threshold: opts.resonance_threshold,
            });
        }
        resolvents.push(Some(inv));
    }
    let solve_k = |k: usize, rhs: &CMatrix| -> CMatrix {
        let inv = resolvents[k].as_ref().expect("resolvent for k >= 2");
        unvectorize(&(inv * vectorize(rhs)), rows, cols)
    };

    let mut f = MatrixSeries::zeros(rows, cols, order);
    f.set_coeff(1, seed.clone())?;
    match opts.strategy {
        Strategy::Recursive => {
            for k in 2..=order {
                let partial = f.truncate(k);
                let rhs = germ.nonlinear(&partial)?;
                f.set_coeff(k, solve_k(k, rhs.coeff(k)))?;
            }
        }
        Strategy::FixedPointSweep => {
            for _ in 1..order {
                let rhs = germ.nonlinear(&f)?;
                let mut next = MatrixSeries::zeros(rows, cols, order);
                next.set_coeff(1, seed.clone())?;
                for k in 2..=order {
                    next.set_coeff(k, solve_k(k, rhs.coeff(k)))?;
                }
                f = next;
            }
        }
    }
    Ok(f)
}

/// Per-order `‖p^k f_k − [G∘f]_k‖ / max(1, ‖p^k f_k‖)` for `k = 0 … N`.
pub fn difference_residuals(germ: &AnalyticGerm, p: Complex64, f: &MatrixSeries) -> Result<Vec<f64>> {
    let lhs = f.dilate(p);
    let rhs = germ.compose(f)?;
    Ok((0..=f.order())
        .map(|k| frobenius_norm(&(lhs.coeff(k) - rhs.coeff(k))) / frobenius_norm(lhs.coeff(k)).max(1.0))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthEntry {
    pub k: usize,
    pub norm: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub a: f64,
    /// Smallest `k` from which `‖(p^k − g₁)^{-1}‖ < 2|p|^{-k}` and
    /// `2A < |p|^{k/2}` hold through the computed order; `None` when no such
    /// `k ≤ N` exists, in which case every index is below `k₀`.
    pub k0: Option<usize>,
    pub c: f64,
    pub b: f64,
    pub entries: Vec<GrowthEntry>,
    pub pass: bool,
}

/// Checks `‖f_k‖ < C B^{k−1}` with `k₀`, `C`, `B` chosen as in the
/// convergence argument: `C` strictly above `‖f_k‖` for `k < k₀`, and
/// `B = 1.01·max(1, AC/(|p|^{1/2} − 1))`.
pub fn growth_bound_check(f: &MatrixSeries, germ: &AnalyticGerm, a: f64, p: Complex64) -> Result<GrowthReport> {
    if !(p.norm() > 1.0) {
        return Err(Error::InvalidParameter(format!("growth bound needs |p| > 1, got {p}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("coefficient bound A must be positive, got {a}")));
    }
    let order = f.order();
    let pa = p.norm();
    let holds = |k: usize| -> Result<bool> {
        let (_, norm) = resolvent(germ.linear_part(), p, k)?;
        Ok(norm < 2.0 * pa.powi(-(k as i32)) && 2.0 * a < pa.powf(k as f64 / 2.0))
    };
    let mut k0 = None;
    for k in (1..=order).rev() {
        if holds(k)? {
            k0 = Some(k);
        } else {
            break;
        }
    }
    let norms = f.coefficient_norms();
    let below = k0.unwrap_or(order + 1);
    let c_max = (1..below.min(order + 1)).map(|k| norms[k]).fold(0.0, f64::max);
    let c = if c_max > 0.0 { c_max * 1.01 } else { 1.0 };
    let b = (a * c / (pa.sqrt() - 1.0)).max(1.0) * 1.01;
    let entries: Vec<GrowthEntry> = (1..=order)
        .map(|k| {
            let bound = c * b.powi(k as i32 - 1);
            GrowthEntry {
                k,
                norm: norms[k],
                bound,
                pass: norms[k] < bound,
            }
        })
        .collect();
    let pass = entries.iter().all(|e| e.pass);
    Ok(GrowthReport {
        a,
        k0,
        c,
        b,
        entries,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::difference::germ::HomogeneousTerm;
    use crate::linalg::{c, ZERO};

    fn unit_seed() -> CMatrix {
        CMatrix::from_element(1, 1, ONE)
    }

    fn scalar_germ(p: f64) -> AnalyticGerm {
        AnalyticGerm::polynomial(vec![
            HomogeneousTerm::new(1, CMatrix::from_element(1, 1, c(p, 0.0))).unwrap(),
            HomogeneousTerm::new(2, CMatrix::from_element(1, 1, ONE)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn linear_germ_with_zero_seed_gives_zero() {
        let g = AnalyticGerm::polynomial(vec![HomogeneousTerm::new(1, CMatrix::from_diagonal_element(2, 2, c(0.5, 0.0))).unwrap()])
            .unwrap();
        let f = solve_difference(&g, c(3.0, 0.0), 8, &CMatrix::zeros(2, 1)).unwrap();
        assert!(f.coeffs().iter().all(|m| m.iter().all(|x| *x == ZERO)));
    }

    #[test]
    fn scalar_quadratic_first_terms() {
        // f(3z) = 3f + f², f₁ = 1: 9f₂ = 3f₂ + 1, 27f₃ = 3f₃ + 2f₂
        let f = solve_difference(&scalar_germ(3.0), c(3.0, 0.0), 3, &unit_seed()).unwrap();
        let f2 = 1.0 / 6.0;
        assert!((f.coeff(2)[(0, 0)] - c(f2, 0.0)).norm() < 1e-15);
        assert!((f.coeff(3)[(0, 0)] - c(2.0 * f2 / 24.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn strategies_agree() {
        let g = scalar_germ(3.0);
        let a = solve_difference(&g, c(3.0, 0.0), 12, &unit_seed()).unwrap();
        let opts = SolveOptions {
            strategy: Strategy::FixedPointSweep,
            ..Default::default()
        };
        let b = solve_difference_with(&g, c(3.0, 0.0), 12, &unit_seed(), opts).unwrap();
        for k in 0..=12 {
            let d = (a.coeff(k)[(0, 0)] - b.coeff(k)[(0, 0)]).norm();
            assert!(d <= 1e-14 * a.coeff(k)[(0, 0)].norm().max(1e-300), "order {k}: {d}");
        }
    }

    #[test]
    fn inconsistent_seed_and_bad_p() {
        let g = scalar_germ(3.0);
        assert!(matches!(
            solve_difference(&g, c(2.0, 0.0), 4, &unit_seed()),
            Err(Error::SeedInconsistent { .. })
        ));
        assert!(solve_difference(&g, c(0.5, 0.0), 4, &unit_seed()).is_err());
    }

    #[test]
    fn resonance_is_reported() {
        // g₁ = diag(2, 4): p = 2 resonates at k = 2
        let g1 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(4.0, 0.0)]));
        let g = AnalyticGerm::polynomial(vec![HomogeneousTerm::new(1, g1).unwrap()]).unwrap();
        let seed = CMatrix::from_column_slice(2, 1, &[ONE, ZERO]);
        let err = solve_difference(&g, c(2.0, 0.0), 5, &seed).unwrap_err();
        assert!(matches!(err, Error::Resonance { order: 2, .. }));
    }

    #[test]
    fn growth_of_zero_series_passes() {
        let g = scalar_germ(3.0);
        let zero = MatrixSeries::zeros(1, 1, 6);
        let r = growth_bound_check(&zero, &g, 3.03, c(3.0, 0.0)).unwrap();
        assert!(r.pass);
        assert_eq!(r.c, 1.0);
    }

    #[test]
    fn inflated_coefficient_fails_growth() {
        let g = scalar_germ(3.0);
        let p = c(3.0, 0.0);
        let mut f = solve_difference(&g, p, 12, &unit_seed()).unwrap();
        let report = growth_bound_check(&f, &g, g.coefficient_bound().unwrap(), p).unwrap();
        assert!(report.pass);
        let bound = report.entries[11].bound;
        f.set_coeff(12, CMatrix::from_element(1, 1, c(bound * 10.0, 0.0))).unwrap();
        let report = growth_bound_check(&f, &g, g.coefficient_bound().unwrap(), p).unwrap();
        assert!(!report.pass);
        assert!(!report.entries[11].pass);
        assert!(report.entries[..11].iter().all(|e| e.pass));
    }
}
