//! Deterministic parallel map over trial ranges.
//!
//! Work is cut into fixed-size chunks that do not depend on the worker
//! count; chunk results come back in chunk order and callers merge them
//! sequentially, so aggregated statistics are identical for any number of
//! workers.

use std::ops::Range;

/// Trials per chunk. Small enough to balance load, large enough to amortise
/// per-chunk scratch allocation.
pub const CHUNK: u64 = 256;

/// Number of worker threads; `None` uses the global default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Workers(pub Option<usize>);

impl Workers {
    pub const SINGLE: Workers = Workers(Some(1));

    pub fn count(self) -> usize {
        match self.0 {
            Some(n) => n.max(1),
            #[cfg(feature = "parallel")]
            None => rayon::current_num_threads(),
            #[cfg(not(feature = "parallel"))]
            None => 1,
        }
    }
}

fn chunks(total: u64) -> Vec<Range<u64>> {
    (0..total.div_ceil(CHUNK)).map(|c| c * CHUNK..((c + 1) * CHUNK).min(total)).collect()
}

/// Applies `f` to each chunk of `0..total` and returns results in chunk order.
pub fn map_chunks<T, F>(total: u64, workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let ranges = chunks(total);
    if workers.count() <= 1 || ranges.len() <= 1 {
        return ranges.into_iter().map(f).collect();
    }
    run_parallel(ranges, workers.count(), f)
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(ranges: Vec<Range<u64>>, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| ranges.into_par_iter().map(&f).collect()),
        Err(_) => ranges.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<T, F>(ranges: Vec<Range<u64>>, _threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    ranges.into_iter().map(f).collect()
}
