use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, max_entry_distance, max_entry_norm, operator_norm, CMatrix, ONE, ZERO};
use crate::sampling::uniform_disc;

use super::series::MatrixSeries;

/// Maps a series `f` with `f(0) = 0` to `G∘f`, truncated to the order of `f`.
pub type Composer = Arc<dyn Fn(&MatrixSeries) -> Result<MatrixSeries> + Send + Sync>;

/// Homogeneous term `g_r(y, …, y)` of a polynomial map on `ℂ^n`, stored as an
/// `n × n^r` matrix acting on `y ⊗ ⋯ ⊗ y` (first factor most significant).
#[derive(Debug, Clone)]
pub struct HomogeneousTerm {
    degree: usize,
    tensor: CMatrix,
}

impl HomogeneousTerm {
    pub fn new(degree: usize, tensor: CMatrix) -> Result<Self> {
        let n = tensor.nrows();
        if degree == 0 || n == 0 {
            return Err(Error::InvalidParameter("homogeneous terms have degree at least 1".into()));
        }
        if Some(tensor.ncols()) != n.checked_pow(degree as u32) {
            return Err(Error::DimensionMismatch(format!(
                "degree-{degree} term on C^{n} needs {n}^{degree} columns, got {}",
                tensor.ncols()
            )));
        }
        Ok(Self { degree, tensor })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn tensor(&self) -> &CMatrix {
        &self.tensor
    }
}

/// Germ at `0` of an analytic map with `G(0) = 0`.
///
/// The unknown is a `rows × cols` matrix; `linear` acts on its row-major
/// vectorisation.
#[derive(Clone)]
pub struct AnalyticGerm {
    rows: usize,
    cols: usize,
    linear: CMatrix,
    composer: Composer,
    fixed_point: Option<CMatrix>,
    bound: Option<f64>,
}

impl fmt::Debug for AnalyticGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticGerm")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("linear", &self.linear)
            .field("bound", &self.bound)
            .finish()
    }
}

pub(crate) fn vectorize(m: &CMatrix) -> CMatrix {
    CMatrix::from_iterator(m.len(), 1, (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])))
}

pub(crate) fn unvectorize(v: &CMatrix, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| v[(i * cols + j, 0)])
}

impl AnalyticGerm {
    /// `G(y) = Σ_r g_r(y, …, y)` on `ℂ^n`. The coefficient bound is
    /// `max_r ‖g_r‖_F^{1/r}`, enlarged by 1% so the bound is strict.
    pub fn polynomial(terms: Vec<HomogeneousTerm>) -> Result<Self> {
        let n = terms
            .first()
            .map(|t| t.tensor.nrows())
            .ok_or_else(|| Error::InvalidParameter("polynomial germ without terms".into()))?;
        if terms.iter().any(|t| t.tensor.nrows() != n) {
            return Err(Error::DimensionMismatch("terms act on different spaces".into()));
        }
        let mut linear = CMatrix::zeros(n, n);
        for t in terms.iter().filter(|t| t.degree == 1) {
            linear += &t.tensor;
        }
        let bound = terms
            .iter()
            .map(|t| frobenius_norm(&t.tensor).powf(1.0 / t.degree as f64))
            .fold(0.0, f64::max)
            * 1.01;
        let terms = Arc::new(terms);
        let composer: Composer = Arc::new(move |f: &MatrixSeries| compose_polynomial(&terms, n, f));
        Ok(Self {
            rows: n,
            cols: 1,
            linear,
            composer,
            fixed_point: None,
            bound: Some(bound),
        })
    }

    /// Germ of `H(Y) = F(X₀ + Y) − X₀` for a map `F` given on series, where
    /// `X₀` is a fixed point of `F`. The linear part is read off by applying
    /// the composer to `E_ij z`.
    pub fn from_map_at_fixed_point<F>(map: F, fixed_point: CMatrix, tol: f64) -> Result<Self>
    where
        F: Fn(&MatrixSeries) -> Result<MatrixSeries> + Send + Sync + 'static,
    {
        let (rows, cols) = fixed_point.shape();
        let image = map(&MatrixSeries::constant(fixed_point.clone(), 0))?;
        let residual = max_entry_distance(image.coeff(0), &fixed_point) / max_entry_norm(&fixed_point).max(1.0);
        if !(residual <= tol) {
            return Err(Error::NotFixedPoint { residual });
        }
        let x0 = fixed_point.clone();
        let composer: Composer = Arc::new(move |f: &MatrixSeries| {
            let shifted = f.add(&MatrixSeries::constant(x0.clone(), f.order()))?;
            let mut out = map(&shifted)?;
            let c0 = out.coeff(0) - &x0;
            out.set_coeff(0, c0)?;
            Ok(out)
        });
        let dim = rows * cols;
        let mut linear = CMatrix::zeros(dim, dim);
        for idx in 0..dim {
            let mut e = CMatrix::zeros(rows, cols);
            e[(idx / cols, idx % cols)] = ONE;
            let mut probe = MatrixSeries::zeros(rows, cols, 1);
            probe.set_coeff(1, e)?;
            let col = vectorize(composer(&probe)?.coeff(1));
            linear.set_column(idx, &col.column(0));
        }
        Ok(Self {
            rows,
            cols,
            linear,
            composer,
            fixed_point: Some(fixed_point),
            bound: None,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn linear_part(&self) -> &CMatrix {
        &self.linear
    }

    pub fn fixed_point(&self) -> Option<&CMatrix> {
        self.fixed_point.as_ref()
    }

    /// `A` with `‖g_n‖ < A^n`, when known in closed form.
    pub fn coefficient_bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn apply_linear(&self, y: &CMatrix) -> CMatrix {
        unvectorize(&(&self.linear * vectorize(y)), self.rows, self.cols)
    }

    /// `G∘f` truncated to the order of `f`; `f(0)` must vanish.
    pub fn compose(&self, f: &MatrixSeries) -> Result<MatrixSeries> {
        if f.shape() != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch(format!(
                "germ on {:?} applied to a series of shape {:?}",
                (self.rows, self.cols),
                f.shape()
            )));
        }
        if f.coeff(0).iter().any(|x| *x != ZERO) {
            return Err(Error::InvalidParameter("germ composition needs f(0) = 0".into()));
        }
        let out = (self.composer)(f)?;
        if out.order() < f.order() || out.shape() != f.shape() {
            return Err(Error::DimensionMismatch("composer returned a short or misshapen series".into()));
        }
        Ok(out.truncate(f.order()))
    }

    /// `G∘f − g₁f`, whose order-`k` coefficient only involves `f_1 … f_{k−1}`.
    pub fn nonlinear(&self, f: &MatrixSeries) -> Result<MatrixSeries> {
        self.compose(f)?.sub(&f.map_linear(|m| self.apply_linear(m)))
    }

    /// Estimate of `A` with `‖g_n‖ < A^n` for `n ≤ order`, from the diagonal
    /// values `ĝ_n(y) = g_n(y, …, y)` along `directions` random unit vectors.
    /// Polarisation gives `‖g_n‖ ≤ (n^n/n!) sup‖ĝ_n‖ ≤ e^n sup‖ĝ_n‖`; the
    /// sampled supremum is widened by 10%.
    pub fn estimate_coefficient_bound(&self, order: usize, directions: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = operator_norm(&self.linear);
        for _ in 0..directions {
            let mut y = CMatrix::from_fn(self.rows, self.cols, |_, _| uniform_disc(&mut rng, 1.0));
            let norm = frobenius_norm(&y);
            if norm == 0.0 {
                continue;
            }
            y /= Complex64::new(norm, 0.0);
            let mut probe = MatrixSeries::zeros(self.rows, self.cols, order);
            probe.set_coeff(1, y)?;
            let image = self.compose(&probe)?;
            for (n, c) in image.coefficient_norms().iter().enumerate().skip(2) {
                a = a.max(std::f64::consts::E * (1.1 * c).powf(1.0 / n as f64));
            }
        }
        Ok(a * 1.01)
    }
}

fn compose_polynomial(terms: &[HomogeneousTerm], n: usize, f: &MatrixSeries) -> Result<MatrixSeries> {
    if f.shape() != (n, 1) {
        return Err(Error::DimensionMismatch(format!("polynomial germ on C^{n} applied to {:?}", f.shape())));
    }
    let order = f.order();
    let components: Vec<Vec<Complex64>> = (0..n).map(|a| f.entry(a, 0)).collect();
    let mut out = MatrixSeries::zeros(n, 1, order);
    let mut acc = vec![vec![ZERO; order + 1]; n];
    for t in terms {
        // depth-first over multi-indices, carrying the prefix product
        let mut stack: Vec<(usize, usize, Vec<Complex64>)> = vec![(0, 0, {
            let mut one = vec![ZERO; order + 1];
            one[0] = ONE;
            one
        })];
        while let Some((depth, col, prod)) = stack.pop() {
            if depth == t.degree {
                for (o, acc_o) in acc.iter_mut().enumerate() {
                    let coef = t.tensor[(o, col)];
                    if coef != ZERO {
                        for (x, p) in acc_o.iter_mut().zip(&prod) {
                            *x += coef * p;
                        }
                    }
                }
                continue;
            }
            for (a, comp) in components.iter().enumerate() {
                stack.push((depth + 1, col * n + a, super::series::scalar_series_mul(&prod, comp)));
            }
        }
    }
    for k in 0..=order {
        out.set_coeff(k, CMatrix::from_fn(n, 1, |o, _| acc[o][k]))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn scalar_germ(p: f64) -> AnalyticGerm {
        AnalyticGerm::polynomial(vec![
            HomogeneousTerm::new(1, CMatrix::from_element(1, 1, c(p, 0.0))).unwrap(),
            HomogeneousTerm::new(2, CMatrix::from_element(1, 1, ONE)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn scalar_quadratic_composition() {
        // G(y) = 3y + y² at f = z + z²: 3z + 3z² + (z + z²)² = 3z + 4z² + 2z³ + z⁴
        let g = scalar_germ(3.0);
        let f = MatrixSeries::from_polynomial(
            vec![CMatrix::zeros(1, 1), CMatrix::from_element(1, 1, ONE), CMatrix::from_element(1, 1, ONE)],
            4,
        )
        .unwrap();
        let out = g.compose(&f).unwrap().entry(0, 0);
        assert_eq!(out, [0.0, 3.0, 4.0, 2.0, 1.0].map(|x| c(x, 0.0)).to_vec());
        assert!((g.coefficient_bound().unwrap() - 3.03).abs() < 1e-12);
    }

    #[test]
    fn bilinear_term_ordering() {
        // g_2(y, y)_0 = y_0 y_1, g_2(y, y)_1 = y_1 y_1
        let mut t = CMatrix::zeros(2, 4);
        t[(0, 1)] = ONE;
        t[(1, 3)] = ONE;
        let g = AnalyticGerm::polynomial(vec![HomogeneousTerm::new(2, t).unwrap()]).unwrap();
        let mut f = MatrixSeries::zeros(2, 1, 2);
        f.set_coeff(1, CMatrix::from_column_slice(2, 1, &[c(2.0, 0.0), c(5.0, 0.0)])).unwrap();
        let out = g.compose(&f).unwrap();
        assert_eq!(out.coeff(2)[(0, 0)], c(10.0, 0.0));
        assert_eq!(out.coeff(2)[(1, 0)], c(25.0, 0.0));
        assert!(HomogeneousTerm::new(2, CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn linear_part_is_probed_exactly() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let mm = m.clone();
        let map = move |x: &MatrixSeries| -> Result<MatrixSeries> {
            // F(X) = X + (X − I) M (X − I)
            let shifted = x.sub(&MatrixSeries::constant(crate::linalg::identity(2), x.order()))?;
            x.add(&shifted.mul(&MatrixSeries::constant(mm.clone(), x.order()))?.mul(&shifted)?)
        };
        let germ = AnalyticGerm::from_map_at_fixed_point(map, crate::linalg::identity(2), 1e-12).unwrap();
        assert!(max_entry_distance(germ.linear_part(), &crate::linalg::identity(4)) < 1e-15);
        let mut f = MatrixSeries::zeros(2, 2, 2);
        f.set_coeff(1, CMatrix::from_element(2, 2, ONE)).unwrap();
        let out = germ.nonlinear(&f).unwrap();
        let expected = CMatrix::from_element(2, 2, ONE) * &m * CMatrix::from_element(2, 2, ONE);
        assert!(max_entry_distance(out.coeff(2), &expected) < 1e-14);
        assert!(out.coeff(1).iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn non_fixed_point_is_rejected() {
        let map = |x: &MatrixSeries| Ok(x.scale(c(2.0, 0.0)));
        let err = AnalyticGerm::from_map_at_fixed_point(map, crate::linalg::identity(2), 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotFixedPoint { .. }));
    }

    #[test]
    fn composition_requires_vanishing_constant() {
        let g = scalar_germ(2.0);
        assert!(g.compose(&MatrixSeries::constant(CMatrix::from_element(1, 1, ONE), 2)).is_err());
    }

    #[test]
    fn bound_estimate_dominates_known_bound() {
        let g = scalar_germ(3.0);
        let est = g.estimate_coefficient_bound(6, 4, 1).unwrap();
        assert!(est >= 3.0);
    }
}
