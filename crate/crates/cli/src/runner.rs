//! Thread-pool execution of replications and candidate fits. Results are
//! gathered in index order, so output does not depend on the worker count.

use rayon::prelude::*;
use rayon::ThreadPool;
use vbcomp_core::assess::{assess_candidate, Assessment};
use vbcomp_core::sim::{assemble, run_replication, ExperimentConfig, ExperimentResult};
use vbcomp_core::Criterion;

use crate::config::{CandidateSpec, RunConfig};
use crate::error::{CliError, Result};

pub fn pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))
}

pub fn run_experiment_parallel(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentResult> {
    cfg.validate()?;
    let outcomes = pool(workers)?.install(|| {
        (0..cfg.reps())
            .into_par_iter()
            .map(|r| (r, run_replication(cfg, r)))
            .collect::<Vec<_>>()
    });
    Ok(assemble(cfg, outcomes)?)
}

/// Assesses every candidate; entries keep the candidate order.
pub fn assess_all(
    specs: &[CandidateSpec],
    criteria: &[Criterion],
    run: &RunConfig,
) -> Result<Vec<vbcomp_core::Result<Assessment>>> {
    Ok(pool(run.workers)?.install(|| {
        specs
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                assess_candidate(
                    &s.data,
                    &s.prior,
                    criteria,
                    s.model_id.clone(),
                    i,
                    &run.assess_options(s.kind),
                )
            })
            .collect()
    }))
}
