//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool;
//! without it every call runs on the calling thread. Results are always
//! returned in index order, so callers that derive per-index RNG streams get
//! identical output in both builds and for every thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs indexed jobs either on the current thread or on a dedicated pool.
pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    /// `threads <= 1`, or a build without `parallel`, gives a sequential executor.
    pub fn new(threads: usize) -> Executor {
        #[cfg(feature = "parallel")]
        {
            let pool = if threads > 1 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| log::warn!("falling back to sequential execution: {e}"))
                    .ok()
            } else {
                None
            };
            Executor { pool }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = threads;
            Executor {}
        }
    }

    pub fn sequential() -> Executor {
        Executor::new(1)
    }

    pub fn threads(&self) -> usize {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.current_num_threads();
        }
        1
    }

    pub fn map<T, F>(&self, range: std::ops::Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| range.into_par_iter().map(&f).collect());
        }
        range.map(f).collect()
    }
}

/// Maps `0..len` on the global rayon pool when `parallel` is set.
pub fn map_range<T, F>(len: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..len).map(f).collect()
}

/// Threads available to the default pool (1 without the `parallel` feature).
pub fn available_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn executors_agree_on_order() {
        let seq = Executor::sequential().map(0..100, |i| i * i);
        let par = Executor::new(4).map(0..100, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(map_range(10, true, |i| i + 1), map_range(10, false, |i| i + 1));
    }
}
