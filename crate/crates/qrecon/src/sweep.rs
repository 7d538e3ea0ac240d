//! Dataset-size sweeps fanned out over a bounded worker pool.

use qrecon_core::experiments::{sweep_cell, sweep_seed, ReconstructionProblem, SweepRow, TrainConfig};

use crate::error::{Error, Result};

/// Same table as [`qrecon_core::experiments::sweep_dataset_size`], with the
/// independent runs spread over `jobs` threads. Results do not depend on `jobs`.
pub fn parallel_sweep(
    problem: &ReconstructionProblem,
    cfg: &TrainConfig,
    sizes: &[usize],
    jobs: usize,
) -> Result<Vec<SweepRow>> {
    if cfg.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let cells: Vec<(usize, usize, u64)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(j, &size)| (0..cfg.repeats).map(move |k| (j, size, sweep_seed(cfg.seed, j, k))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let atfs: Vec<f64> = pool.install(|| {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(_, size, seed)| sweep_cell(problem, cfg, size, seed))
            .collect::<qrecon_core::Result<Vec<_>>>()
    })?;
    Ok(sizes
        .iter()
        .enumerate()
        .map(|(j, &size)| {
            let (seeds, vals): (Vec<u64>, Vec<f64>) = cells
                .iter()
                .zip(&atfs)
                .filter(|((cj, _, _), _)| *cj == j)
                .map(|((_, _, s), a)| (*s, *a))
                .unzip();
            SweepRow::from_runs(size, seeds, vals)
        })
        .collect())
}
