use num_complex::Complex64;
use qdybe_core::felder::{felder_rmatrix, FelderParams};
use qdybe_core::gauge::{twist_equivalence, MultiplicativeForm};
use qdybe_core::linalg::{c, max_entry_distance, CMatrix};
use qdybe_core::qdybe::{basic_rep, morphism_residual, tensor_reps, twist_rep, Representation};
use qdybe_core::sampling::{random_point, PointSample, SampleRegion, Sampler};
use qdybe_core::weight::{DynamicalMorphism, WeightedSpace};

fn basic(n: usize) -> Representation {
    basic_rep(&felder_rmatrix(&FelderParams::new(n, c(0.5, 1.5), c(0.31, 0.07)).unwrap())).unwrap()
}

fn points(n: usize, count: usize) -> Vec<PointSample> {
    let region = SampleRegion::default();
    Sampler::new(4, 1).draw_valid(count, |g| random_point(g, n, &region), |_| true).unwrap()
}

fn zeta(n: usize) -> MultiplicativeForm {
    MultiplicativeForm::one_form(n, move |a, l| {
        let s: Complex64 = l.iter().enumerate().map(|(b, x)| x * (0.2 * (a as f64) - 0.15 * (b as f64) + 0.1)).sum();
        Ok((s * s * 0.5 + a as f64 * 0.3).exp())
    })
    .unwrap()
}

fn diagonal(n: usize) -> DynamicalMorphism {
    let v = WeightedSpace::standard(n);
    DynamicalMorphism::new(v.clone(), v, move |l| {
        Ok(CMatrix::from_fn(n, n, |i, j| if i == j { (l[i] * 0.4 + 0.1 * i as f64).exp() } else { c(0.0, 0.0) }))
    })
    .unwrap()
}

#[test]
fn twist_commutes_with_tensor_product_for_gl3() {
    let b = basic(3);
    let z = zeta(3);
    let lhs = twist_equivalence(&tensor_reps(&b, &b).unwrap(), &z).unwrap();
    let tb = twist_equivalence(&b, &z).unwrap();
    let rhs = tensor_reps(&tb, &tb).unwrap();
    for p in points(3, 10) {
        let x = lhs.l_operator().eval(p.u, &p.lambda).unwrap();
        let y = rhs.l_operator().eval(p.u, &p.lambda).unwrap();
        assert!(max_entry_distance(&x, &y) < 1e-10);
    }
}

#[test]
fn twist_keeps_morphisms() {
    let b = basic(2);
    let f = diagonal(2);
    let a = twist_rep(&b, &f).unwrap();
    let pts = points(2, 10);
    assert!(morphism_residual(&f, &a, &b, &pts).unwrap() <= 1e-9);
    let z = zeta(2);
    let (ta, tb) = (twist_equivalence(&a, &z).unwrap(), twist_equivalence(&b, &z).unwrap());
    assert!(morphism_residual(&f, &ta, &tb, &pts).unwrap() <= 1e-9);
}
