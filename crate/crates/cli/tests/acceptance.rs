//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails or overruns its time budget.

use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qdybe_core::difference::{
    crossing_map, difference_residuals, gl2_crossing_params, growth_bound_check, inverse_crossing_map, solve_difference,
    trigonometric_gl2_series, verify_crossing_series, AnalyticGerm, HomogeneousTerm, MatrixSeries,
};
use qdybe_core::felder::{felder_matrix, felder_rmatrix, FelderParams};
use qdybe_core::gauge::{
    conjugated_rmatrix, d_gamma, exactness_witness, explicit_two_form, form_deviation, gauge_twist, is_exact_witness,
    twist_equivalence, MultiplicativeForm, TwoFormParams,
};
use qdybe_core::linalg::{c, cpow, flip, identity, max_entry_distance, max_entry_norm, CMatrix};
use qdybe_core::qdybe::{
    basic_rep, morphism_residual, qdybe_residual, qdybe_residual_at, rep_residual, tensor_reps, trivial_rep, twist_rep,
    Representation,
};
use qdybe_core::sampling::{random_lambda, random_point, random_triple, PointSample, SampleRegion, Sampler, TripleSample};
use qdybe_core::special_functions::{qgamma, theta1, EllipticModulus, QNome};
use qdybe_core::weight::{DynamicalMorphism, DynamicalOperator, WeightedSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 7] = [
        ("1 theta and q-Gamma identities", 1, special_functions),
        ("2 Felder QDYBE and mutant", 30, felder_qdybe),
        ("3 Felder limits", 1, felder_limits),
        ("4 category laws", 30, category_laws),
        ("5 gauge suite", 60, gauge_suite),
        ("6 difference solver", 30, difference_solver),
        ("7 CLI determinism and exit codes", 10, cli_contract),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!("{tag} {name}: {detail} ({:.2} s)", elapsed.as_secs_f64());
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn check(label: &str, value: f64, ok: bool) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("{label} = {value:.3e}"))
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn rel_matrix(a: &CMatrix, b: &CMatrix) -> f64 {
    max_entry_distance(a, b) / max_entry_norm(b).max(1.0)
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn special_functions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0_f64;
    for tau in [c(0.0, 2.0), c(0.5, 1.5), c(-0.2, 0.8)] {
        let m = EllipticModulus::new(tau).map_err(e)?;
        for _ in 0..50 {
            let z = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let t = theta1(z, &m).map_err(e)?;
            let i_pi = c(0.0, std::f64::consts::PI);
            worst = worst.max(rel(theta1(z + 1.0, &m).map_err(e)?, -t));
            let factor = -(-i_pi * tau - 2.0 * i_pi * z).exp();
            worst = worst.max(rel(theta1(z + tau, &m).map_err(e)?, factor * t));
            worst = worst.max(rel(theta1(-z, &m).map_err(e)?, -t));
        }
    }
    check("theta residual", worst, worst <= 1e-10)?;
    let mut gamma_worst = 0.0_f64;
    for _ in 0..50 {
        let p = Complex64::from_polar(rng.gen_range(0.1..0.8), rng.gen_range(-0.5..0.5));
        let x = c(rng.gen_range(0.2..3.0), rng.gen_range(-0.5..0.5));
        let b = QNome::new(p).map_err(e)?;
        let lhs = qgamma(x + 1.0, &b).map_err(e)?;
        let rhs = (ONE - cpow(p, x)) / (ONE - p) * qgamma(x, &b).map_err(e)?;
        gamma_worst = gamma_worst.max(rel(lhs, rhs));
    }
    check("q-Gamma residual", gamma_worst, gamma_worst <= 1e-10)?;
    Ok(format!("theta {worst:.1e}, q-Gamma {gamma_worst:.1e}"))
}

fn triples(r: &DynamicalOperator, count: usize, seed: u64) -> Result<(f64, Vec<TripleSample>), String> {
    let region = SampleRegion::default();
    let out = Sampler::new(seed, 0)
        .run_checks(count, |g| random_triple(g, r.rank(), &region), |s| qdybe_residual_at(r, s))
        .map_err(e)?;
    Ok((out.residual, out.samples))
}

fn points(rank: usize, count: usize, seed: u64) -> Vec<PointSample> {
    let region = SampleRegion::default();
    (0..count)
        .map(|i| random_point(&mut Sampler::new(seed, 1).rng_for(i), rank, &region))
        .collect()
}

const GAMMAS: [Complex64; 2] = [Complex64::new(0.31, 0.07), Complex64::new(-0.23, 0.11)];
const TAUS: [Complex64; 2] = [Complex64::new(0.0, 2.0), Complex64::new(0.5, 1.5)];

fn felder_qdybe() -> Outcome {
    let mut worst = 0.0_f64;
    let mut weakest_mutant = f64::INFINITY;
    for n in 2..=4 {
        for tau in TAUS {
            for gamma in GAMMAS {
                let params = FelderParams::new(n, tau, gamma).map_err(e)?;
                let r = felder_rmatrix(&params);
                let (res, samples) = triples(&r, 100, 7)?;
                worst = worst.max(res);
                let mutant = DynamicalOperator::new(r.factors().to_vec(), r.step(), move |u, l| {
                    let mut m = felder_matrix(u, l, &params)?;
                    // negate the coefficient of E_lm ⊗ E_ml for l ≠ m
                    for a in 0..n {
                        for b in 0..n {
                            if a != b {
                                let (row, col) = (a * n + b, b * n + a);
                                m[(row, col)] = -m[(row, col)];
                            }
                        }
                    }
                    Ok(m)
                })
                .map_err(e)?;
                weakest_mutant = weakest_mutant.min(qdybe_residual(&mutant, &samples).map_err(e)?);
            }
        }
    }
    check("QDYBE residual", worst, worst <= 1e-9)?;
    check("mutant residual", weakest_mutant, weakest_mutant >= 1e-3)?;
    Ok(format!("max residual {worst:.1e} over 12 configurations, mutant min {weakest_mutant:.1e}"))
}

fn felder_limits() -> Outcome {
    let region = SampleRegion::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut at_zero, mut small_gamma) = (0.0_f64, 0.0_f64);
    for n in 2..=4 {
        for tau in TAUS {
            let params = FelderParams::new(n, tau, GAMMAS[0]).map_err(e)?;
            let tiny = FelderParams::new(n, tau, c(1e-7, 0.0)).map_err(e)?;
            for _ in 0..20 {
                let lam = random_lambda(&mut rng, n, &region);
                at_zero = at_zero.max(max_entry_distance(&felder_matrix(ZERO, &lam, &params).map_err(e)?, &flip(n)));
                let u = c(rng.gen_range(0.2..0.6), rng.gen_range(-0.3..0.3));
                let r = felder_matrix(u, &lam, &tiny).map_err(e)?;
                small_gamma = small_gamma.max(max_entry_distance(&r, &identity(n * n)));
            }
        }
    }
    check("|R(0) - P|", at_zero, at_zero <= 1e-8)?;
    check("|R - 1| at γ = 1e-7", small_gamma, small_gamma <= 1e-4)?;
    Ok(format!("R(0) vs flip {at_zero:.1e}, γ→0 vs identity {small_gamma:.1e}"))
}

fn diagonal_morphism(n: usize, seed: u64) -> Result<DynamicalMorphism, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef: Vec<f64> = (0..n * (n + 1)).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let v = WeightedSpace::standard(n);
    DynamicalMorphism::new(v.clone(), v, move |l| {
        Ok(CMatrix::from_fn(n, n, |i, j| {
            if i != j {
                return ZERO;
            }
            let row = &coef[i * (n + 1)..(i + 1) * (n + 1)];
            let lin: Complex64 = l.iter().zip(row).map(|(x, a)| x * *a).sum();
            (lin + row[n]).exp()
        }))
    })
    .map_err(e)
}

fn l_distance(a: &Representation, b: &Representation, pts: &[PointSample]) -> Result<f64, String> {
    let mut worst = 0.0_f64;
    for p in pts {
        let x = a.l_operator().eval(p.u, &p.lambda).map_err(e)?;
        let y = b.l_operator().eval(p.u, &p.lambda).map_err(e)?;
        worst = worst.max(rel_matrix(&x, &y));
    }
    Ok(worst)
}

fn category_laws() -> Outcome {
    let params = FelderParams::new(2, TAUS[0], GAMMAS[0]).map_err(e)?;
    let r = felder_rmatrix(&params);
    let b = basic_rep(&r).map_err(e)?;
    let pts = points(2, 30, 11);
    let left = tensor_reps(&tensor_reps(&b, &b).map_err(e)?, &b).map_err(e)?;
    let right = tensor_reps(&b, &tensor_reps(&b, &b).map_err(e)?).map_err(e)?;
    let assoc = l_distance(&left, &right, &pts)?;
    check("associativity", assoc, assoc <= 1e-10)?;

    let unit = trivial_rep(WeightedSpace::trivial(1, 2), WeightedSpace::standard(2), r.step()).map_err(e)?;
    let unit_law = l_distance(&tensor_reps(&unit, &b).map_err(e)?, &b, &pts)?
        .max(l_distance(&tensor_reps(&b, &unit).map_err(e)?, &b, &pts)?);
    check("unit law", unit_law, unit_law <= 1e-10)?;

    let (_, samples) = triples(&r, 30, 12)?;
    let bb = rep_residual(&tensor_reps(&b, &b).map_err(e)?, &r, &samples).map_err(e)?;
    check("basic ⊙ basic", bb, bb <= 1e-9)?;

    let f = diagonal_morphism(2, 13)?;
    let twisted = twist_rep(&b, &f).map_err(e)?;
    let tw_rep = rep_residual(&twisted, &r, &samples).map_err(e)?;
    check("twisted representation", tw_rep, tw_rep <= 1e-9)?;
    let iso = morphism_residual(&f, &twisted, &b, &pts)
        .map_err(e)?
        .max(morphism_residual(&f.inverse().map_err(e)?, &b, &twisted, &pts).map_err(e)?);
    check("twist isomorphism", iso, iso <= 1e-9)?;
    Ok(format!(
        "assoc {assoc:.1e}, unit {unit_law:.1e}, basic⊙basic {bb:.1e}, twist rep {tw_rep:.1e}, iso {iso:.1e}"
    ))
}

/// `exp` of a random quadratic polynomial in `λ`, one per index.
fn random_one_form(rank: usize, rng: &mut ChaCha8Rng) -> Result<MultiplicativeForm, String> {
    let quad: Vec<Complex64> = (0..rank * rank).map(|_| c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))).collect();
    let lin: Vec<Complex64> = (0..rank * rank).map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
    MultiplicativeForm::one_form(rank, move |a, l| {
        let s: Complex64 = l
            .iter()
            .enumerate()
            .map(|(b, x)| quad[a * rank + b] * x * x + lin[a * rank + b] * x)
            .sum();
        Ok(s.exp())
    })
    .map_err(e)
}

fn gauge_suite() -> Outcome {
    let region = SampleRegion::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let lambdas = |rank: usize, count: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<Complex64>> {
        (0..count).map(|_| random_lambda(rng, rank, &region)).collect()
    };

    let mut d_squared = 0.0_f64;
    for i in 0..20 {
        let rank = 3 + i % 2;
        let psi = random_one_form(rank, &mut rng)?;
        let dd = d_gamma(&d_gamma(&psi, GAMMAS[0]).map_err(e)?, GAMMAS[0]).map_err(e)?;
        let one = MultiplicativeForm::one(3, rank).map_err(e)?;
        d_squared = d_squared.max(form_deviation(&dd, &one, &lambdas(rank, 5, &mut rng)).map_err(e)?);
    }
    check("d² deviation", d_squared, d_squared <= 1e-10)?;

    let mut exact = 0.0_f64;
    for n in [2, 3] {
        let p = TwoFormParams::new(c(0.6, 0.0), c(3.0, 0.0), ONE).map_err(e)?;
        let phi = explicit_two_form(&p, n).map_err(e)?;
        let psi = exactness_witness(&p, n).map_err(e)?;
        let samples = lambdas(n, 20, &mut rng);
        if !is_exact_witness(&phi, &psi, ONE, &samples, 1e-8).map_err(e)? {
            let defect = form_deviation(&d_gamma(&psi, ONE).map_err(e)?, &phi, &samples).map_err(e)?;
            return Err(format!("exactness witness fails for n = {n}: {defect:.3e}"));
        }
        exact = exact.max(form_deviation(&d_gamma(&psi, ONE).map_err(e)?, &phi, &samples).map_err(e)?);
    }

    let mut twist_qdybe = 0.0_f64;
    let mut reconstruction = 0.0_f64;
    let mut commutation = 0.0_f64;
    for n in [2, 3] {
        let r = felder_rmatrix(&FelderParams::new(n, TAUS[1], GAMMAS[1]).map_err(e)?);
        let zeta = random_one_form(n, &mut rng)?;
        let twisted = gauge_twist(&r, &d_gamma(&zeta, r.step()).map_err(e)?).map_err(e)?;
        let (res, samples) = triples(&twisted, 30, 22)?;
        twist_qdybe = twist_qdybe.max(res);

        let conj = conjugated_rmatrix(&r, &zeta).map_err(e)?;
        for s in &samples {
            let a = twisted.eval(s.u[0] - s.u[1], &s.lambda).map_err(e)?;
            let b = conj.eval(s.u[0] - s.u[1], &s.lambda).map_err(e)?;
            reconstruction = reconstruction.max(rel_matrix(&b, &a));
        }
        let b = basic_rep(&r).map_err(e)?;
        let te = twist_equivalence(&b, &zeta).map_err(e)?;
        reconstruction = reconstruction.max(rep_residual(&te, &conj, &samples).map_err(e)?);

        let pts = points(n, 30, 23);
        let bb = tensor_reps(&b, &b).map_err(e)?;
        let lhs = twist_equivalence(&bb, &zeta).map_err(e)?;
        let rhs = tensor_reps(&te, &te).map_err(e)?;
        commutation = commutation.max(l_distance(&lhs, &rhs, &pts)?);
    }
    check("twisted QDYBE", twist_qdybe, twist_qdybe <= 1e-9)?;
    check("reconstruction", reconstruction, reconstruction <= 1e-9)?;
    check("⊙ commutation", commutation, commutation <= 1e-9)?;
    Ok(format!(
        "d² {d_squared:.1e}, exactness {exact:.1e}, twisted QDYBE {twist_qdybe:.1e}, reconstruction {reconstruction:.1e}, ⊙ {commutation:.1e}"
    ))
}

// Independent oracle for f(pz) = g₁f + g₂(f ⊗ f) with f(0) = 0: compare
// z^k coefficients, which gives (p^k − g₁) f_k = Σ_{i+j=k} g₂(f_i ⊗ f_j)
// with only earlier coefficients on the right.

fn solve_2x2(a: [[Complex64; 2]; 2], b: [Complex64; 2]) -> [Complex64; 2] {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        (b[0] * a[1][1] - a[0][1] * b[1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ]
}

fn oracle_2d(g1: [[Complex64; 2]; 2], g2: &[[Complex64; 4]; 2], p: Complex64, seed: [Complex64; 2], order: usize) -> Vec<[Complex64; 2]> {
    let mut f = vec![[ZERO; 2]; order + 1];
    f[1] = seed;
    for k in 2..=order {
        let mut rhs = [ZERO; 2];
        for i in 1..k {
            let (x, y) = (f[i], f[k - i]);
            for (row, out) in rhs.iter_mut().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        *out += g2[row][2 * a + b] * x[a] * y[b];
                    }
                }
            }
        }
        let pk = p.powu(k as u32);
        let m = [[pk - g1[0][0], -g1[0][1]], [-g1[1][0], pk - g1[1][1]]];
        f[k] = solve_2x2(m, rhs);
    }
    f
}

fn oracle_scalar(p: Complex64, order: usize) -> Vec<Complex64> {
    let mut f = vec![ZERO; order + 1];
    f[1] = ONE;
    for k in 2..=order {
        let conv: Complex64 = (1..k).map(|i| f[i] * f[k - i]).sum();
        f[k] = conv / (p.powu(k as u32) - p);
    }
    f
}

fn series_gap(f: &MatrixSeries, want: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0_f64;
    for (k, w) in want.iter().enumerate() {
        for (i, x) in w.iter().enumerate() {
            worst = worst.max(rel(f.coeff(k)[(i, 0)], *x));
        }
    }
    worst
}

fn difference_solver() -> Outcome {
    const ORDER: usize = 12;
    let mut oracle = 0.0_f64;
    let mut residual = 0.0_f64;
    let mut growth = Vec::new();

    for p in [c(3.0, 0.0), c(2.0, 1.0)] {
        let germ = AnalyticGerm::polynomial(vec![
            HomogeneousTerm::new(1, CMatrix::from_element(1, 1, p)).map_err(e)?,
            HomogeneousTerm::new(2, CMatrix::from_element(1, 1, ONE)).map_err(e)?,
        ])
        .map_err(e)?;
        let f = solve_difference(&germ, p, ORDER, &CMatrix::from_element(1, 1, ONE)).map_err(e)?;
        let want: Vec<Vec<Complex64>> = oracle_scalar(p, ORDER).into_iter().map(|x| vec![x]).collect();
        oracle = oracle.max(series_gap(&f, &want));
        residual = residual.max(difference_residuals(&germ, p, &f).map_err(e)?.into_iter().fold(0.0, f64::max));
        growth.push(growth_bound_check(&f, &germ, germ.coefficient_bound().unwrap_or(1.0), p).map_err(e)?.pass);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (p, mu) in [(c(4.0, 0.0), c(0.5, 0.3)), (c(2.5, -0.5), c(1.2, 0.0))] {
        let mut draw = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let s = [[ONE + draw() * 0.3, draw() * 0.3], [draw() * 0.3, ONE + draw() * 0.3]];
        let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        let s_inv = [[s[1][1] / det, -s[0][1] / det], [-s[1][0] / det, s[0][0] / det]];
        let d = [p, mu];
        let mut g1 = [[ZERO; 2]; 2];
        for (i, row) in g1.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..2).map(|k| s[i][k] * d[k] * s_inv[k][j]).sum();
            }
        }
        let mut g2 = [[ZERO; 4]; 2];
        for row in g2.iter_mut() {
            for x in row.iter_mut() {
                *x = draw();
            }
        }
        let seed = [s[0][0], s[1][0]];
        let germ = AnalyticGerm::polynomial(vec![
            HomogeneousTerm::new(1, CMatrix::from_fn(2, 2, |i, j| g1[i][j])).map_err(e)?,
            HomogeneousTerm::new(2, CMatrix::from_fn(2, 4, |i, j| g2[i][j])).map_err(e)?,
        ])
        .map_err(e)?;
        let f = solve_difference(&germ, p, ORDER, &CMatrix::from_column_slice(2, 1, &seed)).map_err(e)?;
        let want: Vec<Vec<Complex64>> = oracle_2d(g1, &g2, p, seed, ORDER).into_iter().map(|x| x.to_vec()).collect();
        oracle = oracle.max(series_gap(&f, &want));
        residual = residual.max(difference_residuals(&germ, p, &f).map_err(e)?.into_iter().fold(0.0, f64::max));
        growth.push(growth_bound_check(&f, &germ, germ.coefficient_bound().unwrap_or(1.0), p).map_err(e)?.pass);
    }
    check("oracle gap", oracle, oracle <= 1e-10)?;
    check("residual identity", residual, residual <= 1e-10)?;
    if !growth.iter().all(|&g| g) {
        return Err(format!("growth bound failed: {growth:?}"));
    }

    let params = gl2_crossing_params(c(1.5, 0.0)).map_err(e)?;
    let mut birational = 0.0_f64;
    for _ in 0..100 {
        let x = CMatrix::from_fn(4, 4, |i, j| {
            let base = if i == j { ONE } else { ZERO };
            base + c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
        });
        let back = inverse_crossing_map(&crossing_map(&x, &params).map_err(e)?, &params).map_err(e)?;
        birational = birational.max(rel_matrix(&back, &x));
    }
    check("birationality", birational, birational <= 1e-12)?;

    let mut crossing = 0.0_f64;
    let mut prefactor = ZERO;
    for q in [c(1.5, 0.0), c(0.6, 0.1)] {
        let report = verify_crossing_series(&trigonometric_gl2_series(q, 8).map_err(e)?, &gl2_crossing_params(q).map_err(e)?)
            .map_err(e)?;
        crossing = crossing.max(report.max_residual);
        prefactor = report.prefactor[0];
    }
    check("crossing residual", crossing, crossing <= 1e-8)?;
    Ok(format!(
        "oracle {oracle:.1e}, residual {residual:.1e}, growth ok on {} fixtures, birationality {birational:.1e}, crossing {crossing:.1e} (prefactor s₀ = {prefactor:.3})",
        growth.len()
    ))
}

fn run(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_qdybe")).args(args).output().map_err(e)
}

fn cli_contract() -> Outcome {
    let dir = std::env::temp_dir().join(format!("qdybe-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(e)?;
    let grid = dir.join("grid.json");
    let grid = grid.to_str().ok_or("temporary path is not UTF-8")?;

    let deterministic: [&[&str]; 4] = [
        &["--seed", "7", "verify-qdybe"],
        &["--seed", "7", "--n", "3", "gauge", "twist", "--form", "explicit"],
        &["--seed", "7", "solve-difference", "--fixture", "matrix2"],
        &["--seed", "7", "--samples", "5", "export-samples", "--closed"],
    ];
    for args in deterministic {
        let (a, b) = (run(args)?, run(args)?);
        if a.stdout.is_empty() || a.stdout != b.stdout {
            return Err(format!("reports differ between runs of {args:?}"));
        }
    }

    let export = run(&["--seed", "3", "--samples", "4", "--out", grid, "export-samples", "--closed"])?;
    let missing = dir.join("missing.json");
    let missing = missing.to_str().ok_or("temporary path is not UTF-8")?;
    let matrix: [(&[&str], i32); 12] = [
        (&["verify-qdybe"], 0),
        (&["verify-qdybe", "--grid-file", grid], 0),
        (&["gauge", "check-exact"], 0),
        (&["solve-difference", "--fixture", "crossing-gl2"], 0),
        (&["--tol-pass", "1e-30", "--tol-fail", "1e-3", "verify-qdybe"], 2),
        (&["--n", "3", "gauge", "twist", "--form", "non-closed"], 1),
        (&["--gamma", "0", "verify-qdybe"], 64),
        (&["--samples", "0", "verify-qdybe"], 64),
        (&["no-such-command"], 64),
        (&["solve-difference", "--fixture", "resonant"], 65),
        (&["verify-qdybe", "--grid-file", missing], 74),
        (&["--config", missing, "verify-qdybe"], 74),
    ];
    if export.status.code() != Some(0) {
        return Err(format!("export-samples exited with {:?}", export.status.code()));
    }
    for (args, want) in matrix {
        let got = run(args)?.status.code();
        if got != Some(want) {
            return Err(format!("{args:?} exited with {got:?}, expected {want}"));
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    Ok(format!("{} reports byte-identical, {} exit-code cases", deterministic.len(), matrix.len()))
}
