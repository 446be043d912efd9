//! Sampled values of an exchange matrix, for external tooling and for
//! checking matrices that are only known at points.

use std::path::Path;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qdybe_core::linalg::CMatrix;
use qdybe_core::sampling::TripleSample;
use qdybe_core::weight::{DynamicalOperator, WeightedSpace};
use qdybe_core::Error as CoreError;

use crate::error::{CliError, CliResult};

/// Two points closer than this in every coordinate are the same grid point.
pub const MATCH_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub u: Complex64,
    pub lambda: Vec<Complex64>,
    /// Row-major rows of `[re, im]` entries.
    pub matrix: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub n: usize,
    pub step: Complex64,
    pub dim: usize,
    pub records: Vec<GridRecord>,
    /// Sample triples whose QDYBE evaluation only touches recorded points.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triples: Vec<TripleSample>,
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn same_point(r: &GridRecord, u: Complex64, lambda: &[Complex64]) -> bool {
    (r.u - u).norm() <= MATCH_TOLERANCE
        && r.lambda.len() == lambda.len()
        && r.lambda.iter().zip(lambda).all(|(a, b)| (a - b).norm() <= MATCH_TOLERANCE)
}

impl GridFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let grid: GridFile =
            serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.n == 0 || self.dim != self.n * self.n {
            return Err(CliError::Data(format!("grid: dim {} does not match n = {}", self.dim, self.n)));
        }
        for (i, r) in self.records.iter().enumerate() {
            if r.lambda.len() != self.n {
                return Err(CliError::Data(format!("grid record {i}: lambda has length {}", r.lambda.len())));
            }
            if r.matrix.len() != self.dim || r.matrix.iter().any(|row| row.len() != self.dim) {
                return Err(CliError::Data(format!("grid record {i}: matrix is not {0}x{0}", self.dim)));
            }
        }
        Ok(())
    }

    /// Operator on `ℂ^n ⊗ ℂ^n` with standard weights that looks values up
    /// in the grid; unrecorded points are an error.
    pub fn operator(&self) -> CliResult<DynamicalOperator> {
        let v = WeightedSpace::standard(self.n);
        let records = Arc::new(self.records.clone());
        let dim = self.dim;
        Ok(DynamicalOperator::new(vec![v.clone(), v], self.step, move |u, lambda| {
            let r = records
                .iter()
                .find(|r| same_point(r, u, lambda))
                .ok_or_else(|| CoreError::MissingGridPoint(format!("u = {u}, lambda = {lambda:?}")))?;
            Ok(CMatrix::from_fn(dim, dim, |i, j| r.matrix[i][j]))
        })?)
    }
}

/// Wraps an operator and logs every point at which it is evaluated.
pub fn recording(op: &DynamicalOperator) -> CliResult<(DynamicalOperator, Arc<Mutex<Vec<GridRecord>>>)> {
    let log: Arc<Mutex<Vec<GridRecord>>> = Arc::new(Mutex::new(Vec::new()));
    let (inner, sink) = (op.clone(), log.clone());
    let wrapped = DynamicalOperator::new(op.factors().to_vec(), op.step(), move |u, lambda| {
        let m = inner.eval(u, lambda)?;
        let mut records = sink.lock().expect("recording lock");
        if !records.iter().any(|r| same_point(r, u, lambda)) {
            records.push(GridRecord {
                u,
                lambda: lambda.to_vec(),
                matrix: matrix_rows(&m),
            });
        }
        Ok(m)
    })?;
    Ok((wrapped, log))
}
