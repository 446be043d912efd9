use std::path::Path;

use qdybe_core::qdybe::qdybe_residual_at;
use qdybe_core::sampling::Sampler;

use super::{felder, sampled_qdybe, TAG_VERIFY};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::grid::GridFile;
use crate::report::{CheckReport, Report};

pub fn run(cfg: &RunConfig, grid_file: Option<&Path>, report: &mut Report) -> CliResult<()> {
    match grid_file {
        None => {
            let (_, r) = felder(cfg)?;
            report.detail("operator", "felder");
            let sampler = Sampler::new(cfg.seed, TAG_VERIFY);
            let (check, samples) = sampled_qdybe("qdybe", &r, cfg, &sampler)?;
            report.push(check);
            let mut weight = 0.0_f64;
            for s in &samples {
                weight = weight.max(r.weight_defect(s.u[0] - s.u[1], &s.lambda)?);
            }
            report.push(CheckReport::graded("zero_weight", weight, cfg));
        }
        Some(path) => {
            let grid = GridFile::read(path)?;
            if grid.triples.is_empty() {
                return Err(CliError::Data(format!(
                    "{}: grid has no triples to check; export it with --closed",
                    path.display()
                )));
            }
            let r = grid.operator()?;
            report.detail("operator", "grid");
            report.detail("grid_records", grid.records.len());
            report.detail("step", grid.step);
            let mut residual = 0.0_f64;
            let mut condition = 0.0_f64;
            for s in &grid.triples {
                let c = qdybe_residual_at(&r, s)?;
                residual = residual.max(c.residual);
                condition = condition.max(c.condition);
            }
            report.push(CheckReport::graded("qdybe", residual, cfg).sampled(condition, 0, grid.triples.len()));
        }
    }
    Ok(())
}
