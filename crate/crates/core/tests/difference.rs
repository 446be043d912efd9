use qdybe_core::difference::fixtures::{matrix2, resonant, scalar_quadratic};
use qdybe_core::difference::{
    difference_residuals, growth_bound_check, solve_difference, solve_difference_with, SolveOptions, Strategy,
};
use qdybe_core::linalg::c;
use qdybe_core::Error;

#[test]
fn fixtures_solve_with_small_residuals_and_bounded_growth() {
    let cases = [scalar_quadratic(c(3.0, 0.0)).unwrap(), matrix2(c(4.0, 0.0), c(0.5, 0.3), 9).unwrap()];
    for ((germ, seed), p) in cases.into_iter().zip([c(3.0, 0.0), c(4.0, 0.0)]) {
        let f = solve_difference(&germ, p, 16, &seed).unwrap();
        assert!(difference_residuals(&germ, p, &f).unwrap().iter().all(|r| *r <= 1e-10));
        let growth = growth_bound_check(&f, &germ, germ.coefficient_bound().unwrap(), p).unwrap();
        assert!(growth.pass, "{growth:?}");
    }
}

#[test]
fn sweep_and_recursion_agree_on_matrix_fixture() {
    let p = c(3.5, 0.5);
    let (germ, seed) = matrix2(p, c(-0.4, 0.2), 2).unwrap();
    let sweep = SolveOptions {
        strategy: Strategy::FixedPointSweep,
        ..SolveOptions::default()
    };
    let a = solve_difference(&germ, p, 10, &seed).unwrap();
    let b = solve_difference_with(&germ, p, 10, &seed, sweep).unwrap();
    for k in 0..=10 {
        let scale = a.coeff(k).norm().max(1.0);
        assert!((a.coeff(k) - b.coeff(k)).norm() / scale < 1e-12, "order {k}");
    }
}

#[test]
fn resonance_is_reported() {
    let p = c(2.0, 0.0);
    let (germ, seed) = resonant(p).unwrap();
    assert!(matches!(solve_difference(&germ, p, 4, &seed), Err(Error::Resonance { .. })));
}
