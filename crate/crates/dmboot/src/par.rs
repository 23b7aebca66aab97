//! Data-parallel dispatch.
//!
//! Every parallel loop in this crate maps over an index range with an
//! order-preserving collect, so the numerical output is identical whether
//! the `parallel` feature (rayon) is enabled, disabled, or the thread pool
//! has a single worker.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Like [`map_indexed`] but with a per-worker scratch value, so hot loops can
/// reuse buffers instead of allocating per index.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed_scratch<S, T, I, F>(count: usize, init: I, f: F) -> Vec<T>
where
    S: Send,
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map_init(&init, |scratch, i| f(scratch, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed_scratch<S, T, I, F>(count: usize, init: I, f: F) -> Vec<T>
where
    I: Fn() -> S,
    F: Fn(&mut S, usize) -> T,
{
    let mut scratch = init();
    (0..count).map(|i| f(&mut scratch, i)).collect()
}

/// Fallible map; the error reported is always the one with the smallest
/// index, independent of scheduling.
pub(crate) fn try_map_indexed<T, E, F>(count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(count, f).into_iter().collect()
}
