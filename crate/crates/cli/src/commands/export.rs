use qdybe_core::qdybe::qdybe_residual_at;
use qdybe_core::sampling::{random_lambda, uniform_disc, SampleRegion, Sampler};

use super::{felder, sampled_qdybe, TAG_EXPORT};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::grid::{matrix_rows, recording, GridFile, GridRecord};

/// Product grid: `grid_u` spectral values times `grid_lambda` dynamical
/// values, `u` outermost.
pub fn product_grid(cfg: &RunConfig, grid_u: usize, grid_lambda: usize) -> CliResult<GridFile> {
    if grid_u == 0 || grid_lambda == 0 {
        return Err(CliError::Usage("grid dimensions must be positive".into()));
    }
    let (params, r) = felder(cfg)?;
    let region = SampleRegion::default();
    let sampler = Sampler::new(cfg.seed, TAG_EXPORT);
    let no_lambda: [num_complex::Complex64; 0] = [];
    let us = sampler
        .substream(0)
        .draw_valid(grid_u, |g| uniform_disc(g, region.u_radius), |u| !params.near_pole(*u, &no_lambda))?;
    let gamma_free = params.gamma() + 0.5;
    let lambdas = sampler.substream(1).draw_valid(
        grid_lambda,
        |g| random_lambda(g, cfg.n, &region),
        |l| !params.near_pole(gamma_free, l),
    )?;
    let mut records = Vec::with_capacity(grid_u * grid_lambda);
    for u in &us {
        for l in &lambdas {
            records.push(GridRecord {
                u: *u,
                lambda: l.clone(),
                matrix: matrix_rows(&r.eval_checked(*u, l)?),
            });
        }
    }
    Ok(GridFile {
        n: cfg.n,
        step: r.step(),
        dim: r.dim(),
        records,
        triples: Vec::new(),
    })
}

/// Every point the QDYBE check touches at `cfg.samples` triples.
pub fn closed_grid(cfg: &RunConfig) -> CliResult<GridFile> {
    let (_, r) = felder(cfg)?;
    let sampler = Sampler::new(cfg.seed, TAG_EXPORT);
    let (_, triples) = sampled_qdybe("qdybe", &r, cfg, &sampler)?;
    let (rec, log) = recording(&r)?;
    for s in &triples {
        qdybe_residual_at(&rec, s)?;
    }
    let records = log.lock().expect("recording lock").clone();
    Ok(GridFile {
        n: cfg.n,
        step: r.step(),
        dim: r.dim(),
        records,
        triples,
    })
}
