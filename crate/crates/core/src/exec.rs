//! Sequential / data-parallel execution of independent work items.
//!
//! Results always come back in input order, so anything summed or printed
//! downstream is independent of scheduling. Without the `parallel` feature
//! the parallel policy runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecPolicy {
    pub fn map<T, R, M>(self, items: &[T], f: M) -> Vec<R>
    where
        T: Sync,
        R: Send,
        M: Fn(&T) -> R + Sync + Send,
    {
        match self {
            ExecPolicy::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => items.par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            ExecPolicy::Parallel => items.iter().map(f).collect(),
        }
    }

    /// Runs `f` on a pool with `threads` workers (ignored when sequential
    /// or when the `parallel` feature is off).
    pub fn install<R: Send>(self, threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if let (ExecPolicy::Parallel, Some(n)) = (self, threads) {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                return pool.install(f);
            }
        }
        let _ = threads;
        f()
    }
}
