use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qdybe_core::gauge::{
    closedness_defect, d_gamma, exactness_defect, gauge_reparam, gauge_scale, gauge_twist, index_tuples,
    exactness_witness_scaled, explicit_two_form, MultiplicativeForm, SpectralScalar, TwoFormParams,
};
use qdybe_core::qdybe::Verdict;
use qdybe_core::sampling::{random_lambda, SampleRegion, Sampler};
use qdybe_core::special_functions::theta1;

use super::{felder, sampled_qdybe, TAG_GAUGE};
use crate::cli::{FormKind, GaugeAction, ScaleFn};
use crate::config::{parse_complex, parse_complex_list, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::{CheckReport, Report};

/// `cfg.samples` dynamical parameters at which every listed form evaluates.
fn form_samples(cfg: &RunConfig, sampler: &Sampler, forms: &[&MultiplicativeForm]) -> CliResult<Vec<Vec<Complex64>>> {
    let region = SampleRegion::default();
    let n = cfg.n;
    Ok(sampler.draw_valid(
        cfg.samples,
        |g| random_lambda(g, n, &region),
        |l| {
            forms.iter().all(|f| {
                index_tuples(f.degree(), f.rank())
                    .iter()
                    .all(|t| f.component(t, l).is_ok())
            })
        },
    )?)
}

/// `ζ_a(λ) = exp(Σ_b c_ab λ_b + d_a λ_a²)` with seeded coefficients.
pub fn random_one_form(n: usize, seed: u64) -> CliResult<MultiplicativeForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coef = || Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
    let lin: Vec<Vec<Complex64>> = (0..n).map(|_| (0..n).map(|_| coef()).collect()).collect();
    let quad: Vec<Complex64> = (0..n).map(|_| coef()).collect();
    Ok(MultiplicativeForm::one_form(n, move |a, l| {
        let e: Complex64 = lin[a].iter().zip(l).map(|(c, x)| c * x).sum::<Complex64>() + quad[a] * l[a] * l[a];
        Ok(e.exp())
    })?)
}

/// `φ_{m,l} = exp((l − m) Σ_k λ_k²)`; not closed once `n ≥ 3`.
fn non_closed_form(n: usize) -> CliResult<MultiplicativeForm> {
    Ok(MultiplicativeForm::new(2, n, |i, l| {
        let s: Complex64 = l.iter().map(|x| x * x).sum();
        Ok((s * (i[1] as f64 - i[0] as f64)).exp())
    })?)
}

pub fn run(cfg: &RunConfig, action: &GaugeAction, report: &mut Report) -> CliResult<()> {
    let sampler = Sampler::new(cfg.seed, TAG_GAUGE);
    match action {
        GaugeAction::Twist { form } => {
            let (_, r) = felder(cfg)?;
            let phi = match form {
                FormKind::Explicit => explicit_two_form(&TwoFormParams::new(cfg.q, cfg.kappa, cfg.gamma)?, cfg.n)?,
                FormKind::RandomExact => d_gamma(&random_one_form(cfg.n, cfg.seed)?, cfg.gamma)?,
                FormKind::NonClosed => {
                    if cfg.n < 3 {
                        return Err(CliError::Usage("every 2-form on rank 2 is closed; use --n 3 or more".into()));
                    }
                    non_closed_form(cfg.n)?
                }
            };
            report.detail("form", form_name(*form));
            let lambdas = form_samples(cfg, &sampler.substream(1), &[&phi])?;
            let defect = closedness_defect(&phi, cfg.gamma, &lambdas)?;
            let closed = CheckReport::graded("closedness", defect, cfg);
            let closed_ok = closed.verdict == Verdict::Pass;
            report.push(closed.sampled(0.0, 0, lambdas.len()));
            if !closed_ok {
                report.checks.last_mut().expect("just pushed").note = Some("form is not γ-closed; twist skipped".into());
                return Ok(());
            }
            let twisted = gauge_twist(&r, &phi)?;
            let (check, _) = sampled_qdybe("qdybe_twisted", &twisted, cfg, &sampler.substream(2))?;
            report.push(check);
        }
        GaugeAction::Reparam { a, b, mu } => {
            let (_, r) = felder(cfg)?;
            let (a, b) = (parse_complex(a)?, parse_complex(b)?);
            let mu = match mu {
                Some(text) => parse_complex_list(text)?,
                None => vec![Complex64::new(0.0, 0.0); cfg.n],
            };
            let re = gauge_reparam(&r, a, b, &mu)?;
            report.detail("a", a);
            report.detail("b", b);
            report.detail("mu", &mu);
            report.detail("original_step", r.step());
            report.detail("step", re.step());
            let (check, _) = sampled_qdybe("qdybe_reparametrized", &re, cfg, &sampler.substream(2))?;
            report.push(check);
        }
        GaugeAction::Scale { scale_fn } => {
            let (params, r) = felder(cfg)?;
            let c: SpectralScalar = match scale_fn {
                ScaleFn::Theta => {
                    let m = *params.modulus();
                    let g = params.gamma();
                    Arc::new(move |u| Ok(theta1(u - g, &m)? / theta1(u, &m)?))
                }
                ScaleFn::Two => Arc::new(|_| Ok(Complex64::new(2.0, 0.0))),
                ScaleFn::One => Arc::new(|_| Ok(Complex64::new(1.0, 0.0))),
            };
            report.detail(
                "scale_fn",
                match scale_fn {
                    ScaleFn::Theta => "theta",
                    ScaleFn::Two => "two",
                    ScaleFn::One => "one",
                },
            );
            let scaled = gauge_scale(&r, c)?;
            let (check, _) = sampled_qdybe("qdybe_scaled", &scaled, cfg, &sampler.substream(2))?;
            report.push(check);
        }
        GaugeAction::CheckExact => {
            let params = TwoFormParams::new(cfg.q, cfg.kappa, cfg.gamma)?;
            let phi = explicit_two_form(&params, cfg.n)?;
            let psi = exactness_witness_scaled(&params, cfg.n)?;
            report.detail("p", params.p());
            let lambdas = form_samples(cfg, &sampler.substream(3), &[&phi, &psi])?;
            let defect = exactness_defect(&phi, &psi, cfg.gamma, &lambdas)?;
            report.push(CheckReport::graded("exactness_witness", defect, cfg).sampled(0.0, 0, lambdas.len()));
            let mut transposition = 0.0_f64;
            for l in &lambdas {
                transposition = transposition.max(phi.transposition_defect(l)?);
            }
            report.push(CheckReport::graded("transposition_inversion", transposition, cfg));
            let closed = closedness_defect(&phi, cfg.gamma, &lambdas)?;
            report.push(CheckReport::graded("closedness", closed, cfg));
        }
    }
    Ok(())
}

fn form_name(f: FormKind) -> &'static str {
    match f {
        FormKind::Explicit => "explicit",
        FormKind::RandomExact => "random-exact",
        FormKind::NonClosed => "non-closed",
    }
}
