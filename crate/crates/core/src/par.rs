//! Order-preserving chunked maps with a rayon backend and a sequential
//! fallback.
//!
//! Every helper returns results in chunk order regardless of how the chunks
//! were scheduled, so callers that fold the results left to right get the
//! same answer from one worker or many.

use std::ops::Range;

/// How chunked work is executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    /// Run every chunk on the calling thread.
    Sequential,
    /// Spread chunks over the current rayon pool (sequential when the
    /// `parallel` feature is off).
    #[default]
    Rayon,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon
    }
}

/// Splits `0..len` into consecutive ranges of at most `chunk` items.
pub fn chunks(len: usize, chunk: usize) -> Vec<Range<usize>> {
    let chunk = chunk.max(1);
    (0..len)
        .step_by(chunk)
        .map(|s| s..(s + chunk).min(len))
        .collect()
}

/// Maps every item, preserving input order.
pub fn map_items<T, R, F>(items: &[T], mode: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Maps each range of `0..len` (split every `chunk` items), preserving order.
pub fn map_ranges<R, F>(len: usize, chunk: usize, mode: Parallelism, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync + Send,
{
    let ranges = chunks(len, chunk);
    map_items(&ranges, mode, |r| f(r.clone()))
}

/// First index in `0..len` (by index, not by completion time) for which
/// `f` returns `Some`.
pub fn find_first<R, F>(len: usize, mode: Parallelism, f: F) -> Option<(usize, R)>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().find_map_first(|i| f(i).map(|r| (i, r)));
    }
    let _ = mode;
    (0..len).find_map(|i| f(i).map(|r| (i, r)))
}

/// Runs `f` inside a rayon pool of `workers` threads (or directly, when
/// the `parallel` feature is disabled or `workers <= 1`).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if workers > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(f);
        }
    }
    let _ = workers;
    f()
}
