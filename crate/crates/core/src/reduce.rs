//! Deterministic reductions.
//!
//! Floating sums here are performed over a fixed chunk grid in index
//! order, with a balanced pairwise tree over the chunk partials. The
//! result depends only on the input order and the chunk size — never on
//! the number of worker threads — so parallel runs are bit-reproducible.

use num::traits::Zero;
use rayon::prelude::*;
use std::ops::Add;

/// Fixed chunk width used by the parallel kernels in this crate.
pub const DEFAULT_CHUNK: usize = 4096;

/// Balanced pairwise sum over the slice in its given order.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Zero + Add<Output = T>,
{
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Parallel sum over `0..total` split into fixed `chunk`-sized blocks.
///
/// `f(start, end)` must return the (sequentially accumulated) partial for
/// the half-open index block; block boundaries are a pure function of
/// `total` and `chunk`, so the reduction tree is worker-count independent.
pub fn par_chunked_sum<T, F>(total: usize, chunk: usize, f: F) -> T
where
    T: Copy + Zero + Add<Output = T> + Send,
    F: Fn(usize, usize) -> T + Sync,
{
    if total == 0 {
        return T::zero();
    }
    let chunk = chunk.max(1);
    let n_chunks = total.div_ceil(chunk);
    let partials: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| f(c * chunk, ((c + 1) * chunk).min(total)))
        .collect();
    pairwise_sum(&partials)
}
