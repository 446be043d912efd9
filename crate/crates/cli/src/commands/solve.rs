use std::path::Path;

use num_complex::Complex64;

use qdybe_core::difference::{
    difference_residuals, fixtures, gl2_crossing_params, growth_bound_check, oriented_map_series,
    trigonometric_gl2, trigonometric_gl2_series, verify_crossing_series, ybe_residual, AnalyticGerm, CrossingParams,
    GrowthReport, MatrixSeries, FIXED_POINT_TOLERANCE,
};
use qdybe_core::qdybe::Verdict;
use qdybe_core::sampling::{uniform_disc, Sampler};
use serde_json::Value;

use super::TAG_SOLVE;
use crate::cli::{Fixture, SolveArgs};
use crate::config::{parse_complex, parse_real_list, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::{to_json_string, CheckReport, Report};

fn growth_check(growth: &GrowthReport) -> CheckReport {
    let worst = growth
        .entries
        .iter()
        .map(|e| e.norm / e.bound)
        .fold(0.0, f64::max);
    let verdict = if growth.pass { Verdict::Pass } else { Verdict::Fail };
    let mut check = CheckReport::with_verdict("growth_bound", worst, verdict);
    if let Some(bad) = growth.entries.iter().find(|e| !e.pass) {
        check = check.note(format!("first violation at k = {}", bad.k));
    }
    check
}

fn write_series(path: &Path, coeffs: Value) -> CliResult<()> {
    std::fs::write(path, to_json_string(&coeffs)).map_err(|e| CliError::io(path, e))
}

pub fn run(cfg: &RunConfig, args: &SolveArgs, report: &mut Report) -> CliResult<()> {
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let series = MatrixSeries::from_json(&value).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let series = series.truncate(series.order().min(cfg.order));
        let rho: Vec<Complex64> = match &args.rho {
            Some(text) => parse_real_list(text)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            None => vec![Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)],
        };
        let (rows, _) = series.shape();
        if rho.is_empty() || rows % rho.len() != 0 {
            return Err(CliError::Usage(format!("series dimension {rows} is not a multiple of dim V = {}", rho.len())));
        }
        let params = CrossingParams::new(cfg.q, args.mfactor, args.hvee, rho.clone(), rows / rho.len())?;
        report.detail("input", path.display().to_string());
        return crossing(cfg, &series, &params, args.series_out.as_deref(), report);
    }

    report.detail("fixture", fixture_name(args.fixture));
    let p_default = match args.fixture {
        Fixture::Scalar => 3.0,
        Fixture::Matrix2 => 4.0,
        Fixture::Resonant => 2.0,
        Fixture::CrossingGl2 => {
            let params = gl2_crossing_params(cfg.q)?;
            let series = trigonometric_gl2_series(cfg.q, cfg.order)?;
            let sampler = Sampler::new(cfg.seed, TAG_SOLVE);
            let triples: Vec<[Complex64; 3]> = (0..cfg.samples.min(20))
                .map(|i| {
                    let mut g = sampler.rng_for(i);
                    [0; 3].map(|_| Complex64::new(1.0, 0.0) + uniform_disc(&mut g, 0.5))
                })
                .collect();
            let ybe = ybe_residual(|z| Ok(trigonometric_gl2(cfg.q, z)), 2, &triples)?;
            report.push(CheckReport::graded("fixture_yang_baxter", ybe, cfg).sampled(0.0, 0, triples.len()));
            return crossing(cfg, &series, &params, args.series_out.as_deref(), report);
        }
    };
    let p = match &args.p {
        Some(text) => parse_complex(text)?,
        None => Complex64::new(p_default, 0.0),
    };
    let (germ, seed) = match args.fixture {
        Fixture::Scalar => fixtures::scalar_quadratic(p)?,
        Fixture::Matrix2 => fixtures::matrix2(p, Complex64::new(0.5, 0.3), cfg.seed)?,
        Fixture::Resonant => fixtures::resonant(p)?,
        Fixture::CrossingGl2 => unreachable!("handled above"),
    };
    report.detail("p", p);
    let f = qdybe_core::difference::solve_difference(&germ, p, cfg.order, &seed)?;
    let residuals = difference_residuals(&germ, p, &f)?;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    report.push(CheckReport::graded("residual_identity", worst, cfg));
    let a = germ.coefficient_bound().expect("polynomial fixtures carry a bound");
    let growth = growth_bound_check(&f, &germ, a, p)?;
    report.push(growth_check(&growth));
    report.detail("order_residuals", &residuals);
    report.detail("coefficient_norms", &f.coefficient_norms()[1..]);
    report.detail("growth", &growth);
    if let Some(path) = &args.series_out {
        let coeffs = f.to_json().as_array().expect("series JSON is an array")[1..].to_vec();
        write_series(path, Value::Array(coeffs))?;
    }
    Ok(())
}

fn crossing(
    cfg: &RunConfig,
    series: &MatrixSeries,
    params: &CrossingParams,
    series_out: Option<&Path>,
    report: &mut Report,
) -> CliResult<()> {
    let out = verify_crossing_series(series, params)?;
    report.push(
        CheckReport::graded("crossing", out.max_residual, cfg).note("modulo the reported scalar prefactor"),
    );
    let normalized = series.scalar_mul(&out.normalizer)?;
    let map_params = params.clone();
    let germ = AnalyticGerm::from_map_at_fixed_point(
        move |x: &MatrixSeries| oriented_map_series(x, &map_params),
        series.coeff(0).clone(),
        FIXED_POINT_TOLERANCE,
    )?;
    let a = germ.estimate_coefficient_bound(series.order().max(2), 8, cfg.seed)?;
    let growth = growth_bound_check(&normalized.without_constant(), &germ, a, out.p)?;
    report.push(growth_check(&growth).note("A estimated from sampled directions"));
    report.detail("crossing", &out);
    report.detail("growth", &growth);
    if let Some(path) = series_out {
        write_series(path, normalized.to_json())?;
    }
    Ok(())
}

fn fixture_name(f: Fixture) -> &'static str {
    match f {
        Fixture::Scalar => "scalar",
        Fixture::Matrix2 => "matrix2",
        Fixture::CrossingGl2 => "crossing-gl2",
        Fixture::Resonant => "resonant",
    }
}
