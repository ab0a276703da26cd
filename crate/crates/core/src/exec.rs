//! Execution strategy for the data-parallel loops (sampling, Monte Carlo,
//! sufficient-statistic sums, verification grids).
//!
//! Work is always split into the same index-addressed chunks, and results are
//! collected in index order, so both strategies produce bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of draws handled by one RNG stream.
pub const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise sequential.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(0..n)` and returns results in index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Splits `total` items into `CHUNK`-sized ranges and maps each.
    pub fn map_chunks<T, F>(self, total: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, std::ops::Range<usize>) -> T + Sync + Send,
    {
        let n_chunks = total.div_ceil(CHUNK);
        self.map_indexed(n_chunks, |c| {
            let start = c * CHUNK;
            f(c, start..(start + CHUNK).min(total))
        })
    }
}
