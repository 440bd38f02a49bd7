//! Parallel trial execution with in-order aggregation.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rng::{rng_stream, Domain};
use crate::error::{Error, Result};

/// Trials evaluated per parallel batch; bounds memory held between folds.
pub const BLOCK: u64 = 4096;

/// Runs independent trials on a fixed-size thread pool. Trial `i` draws
/// from [`rng_stream`]`(seed, domain, i)` and results are folded in index
/// order, so the outcome does not depend on the thread count.
pub struct Runner {
    pool: rayon::ThreadPool,
    seed: u64,
    parallelism: usize,
}

impl Runner {
    pub fn new(parallelism: usize, seed: u64) -> Result<Self> {
        if parallelism == 0 {
            return Err(Error::Invalid("parallelism must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| Error::Invalid(format!("cannot start thread pool: {e}")))?;
        Ok(Runner {
            pool,
            seed,
            parallelism,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn parallelism(&self) -> usize {
        self.parallelism
    }

    /// Evaluate `trial` for `0..trials` and hand each result to `fold` in
    /// index order. Stops at the first failing trial.
    pub fn run<T, F, G>(&self, domain: Domain, trials: u64, trial: F, mut fold: G) -> Result<()>
    where
        T: Send,
        F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
        G: FnMut(u64, T),
    {
        let seed = self.seed;
        let mut start = 0;
        while start < trials {
            let end = (start + BLOCK).min(trials);
            let batch: Vec<Result<T>> = self.pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|i| trial(i, &mut rng_stream(seed, domain, i)))
                    .collect()
            });
            for (offset, r) in batch.into_iter().enumerate() {
                fold(start + offset as u64, r?);
            }
            start = end;
        }
        Ok(())
    }

    /// Run a closure inside the pool, for parallel work that is not a trial loop.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}
