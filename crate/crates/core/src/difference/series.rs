use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, try_inverse, CMatrix, ZERO};

/// Truncated power series `Σ_{k=0}^{N} a_k z^k` with matrix coefficients.
///
/// Arithmetic truncates to the smaller order of the operands. Series valued
/// in `ℂ^n` are `n × 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSeries {
    rows: usize,
    cols: usize,
    coeffs: Vec<CMatrix>,
}

impl MatrixSeries {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidParameter("a series needs at least one coefficient".into()))?;
        let (rows, cols) = first.shape();
        if coeffs.iter().any(|c| c.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch("series coefficients differ in shape".into()));
        }
        Ok(Self { rows, cols, coeffs })
    }

    pub fn zeros(rows: usize, cols: usize, order: usize) -> Self {
        Self {
            rows,
            cols,
            coeffs: vec![CMatrix::zeros(rows, cols); order + 1],
        }
    }

    pub fn constant(m: CMatrix, order: usize) -> Self {
        let mut s = Self::zeros(m.nrows(), m.ncols(), order);
        s.coeffs[0] = m;
        s
    }

    /// Series of a polynomial, padded with zeros (or truncated) to `order`.
    pub fn from_polynomial(coeffs: Vec<CMatrix>, order: usize) -> Result<Self> {
        let mut s = Self::new(coeffs)?;
        s.coeffs.resize(order + 1, CMatrix::zeros(s.rows, s.cols));
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn coeff(&self, k: usize) -> &CMatrix {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, m: CMatrix) -> Result<()> {
        if k > self.order() || m.shape() != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch(format!("cannot set coefficient {k}")));
        }
        self.coeffs[k] = m;
        Ok(())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.resize(order + 1, CMatrix::zeros(self.rows, self.cols));
        s
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "series of shape {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let n = self.order().min(other.order());
        Self::new((0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let n = self.order().min(other.order());
        Self::new((0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_linear(|m| m * c)
    }

    /// Cauchy product with matrix multiplication of coefficients.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "series product of {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let n = self.order().min(other.order());
        let mut out = Self::zeros(self.rows, other.cols, n);
        for i in 0..=n {
            if self.coeffs[i].iter().all(|x| *x == ZERO) {
                continue;
            }
            for j in 0..=n - i {
                out.coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
            }
        }
        Ok(out)
    }

    /// `s(z)·A(z)` for a scalar series `s`.
    pub fn scalar_mul(&self, s: &[Complex64]) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty scalar series".into()));
        }
        let n = self.order().min(s.len() - 1);
        let mut out = Self::zeros(self.rows, self.cols, n);
        for i in 0..=n {
            for j in 0..=n - i {
                out.coeffs[i + j] += &self.coeffs[j] * s[i];
            }
        }
        Ok(out)
    }

    /// Inverse series; needs a square invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square series".into()));
        }
        let a0_inv = try_inverse(&self.coeffs[0], "series constant term")?;
        let n = self.order();
        let mut out = Self::zeros(self.rows, self.cols, n);
        out.coeffs[0] = a0_inv.clone();
        for k in 1..=n {
            let mut acc = CMatrix::zeros(self.rows, self.cols);
            for j in 1..=k {
                acc += &self.coeffs[j] * &out.coeffs[k - j];
            }
            out.coeffs[k] = -(&a0_inv * acc);
        }
        Ok(out)
    }

    /// `A(h(z))` for a scalar series `h` with `h(0) = 0`, by Horner's rule.
    pub fn compose(&self, inner: &[Complex64]) -> Result<Self> {
        if inner.is_empty() || inner[0] != ZERO {
            return Err(Error::InvalidParameter("inner series must vanish at zero".into()));
        }
        let n = self.order().min(inner.len() - 1);
        let mut acc = Self::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.scalar_mul(&inner[..=n])?;
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// `A(pz)`.
    pub fn dilate(&self, p: Complex64) -> Self {
        let mut pk = Complex64::new(1.0, 0.0);
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= pk;
            pk *= p;
        }
        out
    }

    /// Apply a linear map to every coefficient.
    pub fn map_linear<F>(&self, f: F) -> Self
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let coeffs: Vec<CMatrix> = self.coeffs.iter().map(f).collect();
        let (rows, cols) = coeffs[0].shape();
        Self { rows, cols, coeffs }
    }

    pub fn try_map_linear<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&CMatrix) -> Result<CMatrix>,
    {
        Self::new(self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?)
    }

    /// `A(z)` with `A(0)` replaced by zero.
    pub fn without_constant(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = CMatrix::zeros(self.rows, self.cols);
        s
    }

    /// Frobenius norm of each coefficient.
    pub fn coefficient_norms(&self) -> Vec<f64> {
        self.coeffs.iter().map(frobenius_norm).collect()
    }

    /// Entry `(i, j)` as a scalar series.
    pub fn entry(&self, i: usize, j: usize) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c[(i, j)]).collect()
    }

    /// Array of coefficients, each an array of rows of `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .map(|m| {
                    Value::Array(
                        (0..m.nrows())
                            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidParameter(format!("series JSON: {what}"));
        let coeffs = value.as_array().ok_or_else(|| bad("expected an array of coefficients"))?;
        let mut out = Vec::with_capacity(coeffs.len());
        for m in coeffs {
            let rows = m.as_array().ok_or_else(|| bad("coefficient must be an array of rows"))?;
            let ncols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
            let mut mat = CMatrix::zeros(rows.len(), ncols);
            for (i, row) in rows.iter().enumerate() {
                let row = row.as_array().ok_or_else(|| bad("row must be an array"))?;
                if row.len() != ncols {
                    return Err(bad("ragged rows"));
                }
                for (j, e) in row.iter().enumerate() {
                    let pair = e.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("entry must be [re, im]"))?;
                    let re = pair[0].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
                    let im = pair[1].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
                    mat[(i, j)] = Complex64::new(re, im);
                }
            }
            out.push(mat);
        }
        Self::new(out)
    }
}

/// Cauchy product of scalar series, truncated to the shorter one.
pub fn scalar_series_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().min(b.len());
    let mut out = vec![ZERO; n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `a / b` as scalar series; `b(0)` must be nonzero.
pub fn scalar_series_div(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.len().min(b.len());
    if n == 0 || b[0] == ZERO {
        return Err(Error::Singular("scalar series division by a series vanishing at zero".into()));
    }
    let mut out = vec![ZERO; n];
    for k in 0..n {
        let mut acc = a[k];
        for j in 1..=k {
            acc -= b[j] * out[k - j];
        }
        out[k] = acc / b[0];
    }
    Ok(out)
}
