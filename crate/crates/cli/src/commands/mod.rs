pub mod export;
pub mod gauge;
pub mod solve;
pub mod verify;

use qdybe_core::felder::{felder_rmatrix, FelderParams};
use qdybe_core::sampling::{random_triple, SampleRegion, Sampler, TripleSample};
use qdybe_core::weight::DynamicalOperator;
use qdybe_core::qdybe::qdybe_residual_at;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::CheckReport;

/// Stream tags keeping each command's draws independent of the others.
pub const TAG_VERIFY: u64 = 1;
pub const TAG_GAUGE: u64 = 2;
pub const TAG_SOLVE: u64 = 3;
pub const TAG_EXPORT: u64 = 4;

pub fn felder(cfg: &RunConfig) -> CliResult<(FelderParams, DynamicalOperator)> {
    let params = FelderParams::new(cfg.n, cfg.tau, cfg.gamma)?;
    Ok((params, felder_rmatrix(&params)))
}

/// QDYBE residual of `r` over `cfg.samples` seeded triples, redrawing
/// near-singular ones.
pub fn sampled_qdybe(
    name: &str,
    r: &DynamicalOperator,
    cfg: &RunConfig,
    sampler: &Sampler,
) -> CliResult<(CheckReport, Vec<TripleSample>)> {
    let region = SampleRegion::default();
    let rank = r.rank();
    let res = sampler.run_checks(cfg.samples, |g| random_triple(g, rank, &region), |s| qdybe_residual_at(r, s))?;
    let check = CheckReport::graded(name, res.residual, cfg).sampled(res.max_condition, res.rejected, res.samples.len());
    Ok((check, res.samples))
}
