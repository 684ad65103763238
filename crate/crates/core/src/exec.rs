//! Ordered data-parallel maps.
//!
//! With the `parallel` feature, [`Execution::Parallel`] fans work out over the
//! rayon pool; without it, both variants run sequentially. Output order always
//! follows input order, and when several items fail the error of the lowest
//! index is returned, so results never depend on scheduling.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually runs on more than one thread in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Fallible [`map`]: returns the error of the first failing item by index.
pub fn try_map<T, R, E, F>(exec: Execution, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    if !exec.is_parallel() {
        return items.iter().map(f).collect();
    }
    map(exec, items, f).into_iter().collect()
}

/// Number of worker threads parallel maps will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Caps the global worker pool at `threads` (0 keeps the default). Only the
/// first call in a process has an effect; returns whether it took effect.
pub fn init_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return false;
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..1000).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let ys = map(exec, &xs, |x| x * x);
            assert!(ys.iter().enumerate().all(|(i, y)| *y == (i * i) as u64));
        }
    }

    #[test]
    fn lowest_index_error_wins() {
        let xs: Vec<i32> = (0..500).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let r: Result<Vec<i32>, i32> =
                try_map(exec, &xs, |&x| if x % 97 == 96 { Err(x) } else { Ok(x) });
            assert_eq!(r.unwrap_err(), 96);
        }
    }
}
