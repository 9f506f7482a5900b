//! Thread pool plumbing. `PIVOTREE_THREADS` caps the worker count.

use std::sync::Arc;

use pivotree_core::mcts::{EpisodeExecutor, EpisodeJob, RolloutResult};
use rayon::prelude::*;
use rayon::ThreadPool;

pub const THREADS_ENV: &str = "PIVOTREE_THREADS";

/// Worker count from `PIVOTREE_THREADS`, or rayon's default if unset or
/// not a positive integer.
pub fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

pub fn build_pool() -> Arc<ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    Arc::new(builder.build().expect("thread pool"))
}

/// Runs each exploration batch on a rayon pool. Results are returned in
/// job order, so output does not depend on scheduling.
#[derive(Clone)]
pub struct RayonExecutor {
    pool: Arc<ThreadPool>,
}

impl RayonExecutor {
    pub fn new(pool: Arc<ThreadPool>) -> Self {
        Self { pool }
    }
}

impl EpisodeExecutor for RayonExecutor {
    fn execute(
        &self,
        jobs: &[EpisodeJob],
        run: &(dyn Fn(&EpisodeJob) -> RolloutResult + Sync),
    ) -> Vec<RolloutResult> {
        self.pool.install(|| jobs.par_iter().map(run).collect())
    }
}
