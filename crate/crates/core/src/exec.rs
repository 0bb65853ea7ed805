//! Execution strategy for data-parallel loops.
//!
//! With the `parallel` feature each index is evaluated on the rayon pool;
//! without it [`Execution::Parallel`] degrades to the sequential loop.
//! Every index is evaluated independently so both strategies return the
//! same values in the same order.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
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

/// Evaluates `f(0..n)` and collects the results in index order.
pub fn map_indices<T, F>(n: usize, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().with_min_len(32).map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
