use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{c, identity, try_inverse, CMatrix, ONE, ZERO};

use super::germ::{AnalyticGerm, HomogeneousTerm};

/// `G(y) = p y + y²` on `ℂ`, seeded with `f₁ = 1`.
pub fn scalar_quadratic(p: Complex64) -> Result<(AnalyticGerm, CMatrix)> {
    let germ = AnalyticGerm::polynomial(vec![
        HomogeneousTerm::new(1, CMatrix::from_element(1, 1, p))?,
        HomogeneousTerm::new(2, CMatrix::from_element(1, 1, ONE))?,
    ])?;
    Ok((germ, CMatrix::from_element(1, 1, ONE)))
}

fn random_entry(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Quadratic germ on `ℂ²` with `g₁ = S diag(p, μ) S^{-1}` and a random `g₂`;
/// the seed is the `p`-eigenvector `S e₁`.
pub fn matrix2(p: Complex64, mu: Complex64, seed: u64) -> Result<(AnalyticGerm, CMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = identity(2) + CMatrix::from_fn(2, 2, |_, _| random_entry(&mut rng) * 0.3);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![p, mu]));
    let g1 = &s * d * try_inverse(&s, "fixture basis")?;
    let g2 = CMatrix::from_fn(2, 4, |_, _| random_entry(&mut rng));
    let germ = AnalyticGerm::polynomial(vec![HomogeneousTerm::new(1, g1)?, HomogeneousTerm::new(2, g2)?])?;
    Ok((germ, s.columns(0, 1).into_owned()))
}

/// `g₁ = diag(p, p²)`: the order-2 resolvent is singular.
pub fn resonant(p: Complex64) -> Result<(AnalyticGerm, CMatrix)> {
    let g1 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![p, p * p]));
    let mut g2 = CMatrix::zeros(2, 4);
    g2[(1, 0)] = ONE;
    let germ = AnalyticGerm::polynomial(vec![HomogeneousTerm::new(1, g1)?, HomogeneousTerm::new(2, g2)?])?;
    Ok((germ, CMatrix::from_column_slice(2, 1, &[ONE, ZERO])))
}
