//! Data-parallel map helpers with a sequential fallback.
//!
//! Every bulk operation in this crate (grid sweeps, per-node potential
//! evaluation, sampling plans) funnels through [`par_map`]. With the
//! `parallel` feature enabled the work is distributed over the global
//! work-stealing pool; without it the same closure runs in a plain loop.
//! Output order is the input order in both builds, so downstream code and
//! golden files never observe the difference.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Map `f` over the index range `0..n`, preserving order.
pub fn par_map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential map with the same signature as [`par_map`], for comparison
/// benchmarks and for callers that must stay on one thread.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
