//! Thread-pool executor for independent Newton runs.

use rayon::prelude::*;

use multistat_core::witness::{CertifiedRoot, SeedExecutor};

pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `None` uses one thread per core.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        Ok(Parallel { pool: b.build()? })
    }
}

impl SeedExecutor for Parallel {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> Option<CertifiedRoot> + Sync)) -> Vec<Option<CertifiedRoot>> {
        self.pool.install(|| (0..jobs).into_par_iter().map(job).collect())
    }
}
