//! Execution helpers that run on rayon with the `parallel` feature and fall
//! back to plain iterators without it.
//!
//! Every helper returns results in index order, so callers that reduce the
//! output sequentially get the same bits in both builds and at any thread
//! count.

/// Human-readable name of the active backend, used in bench ids and reports.
pub const BACKEND: &str = if cfg!(feature = "parallel") {
    "rayon"
} else {
    "sequential"
};

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps `f` over a slice, returning results in slice order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over fixed-size chunks of `items`, returning one result per chunk
/// in chunk order. The chunk boundaries depend only on `chunk_size`.
pub fn map_chunks<S, T, F>(items: &[S], chunk_size: usize, f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&[S]) -> T + Sync + Send,
{
    let chunk_size = chunk_size.max(1);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_chunks(chunk_size).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks(chunk_size).map(f).collect()
    }
}

/// Configures the global thread pool. `0` leaves the rayon default in place.
/// Without the `parallel` feature this is a no-op.
pub fn init_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        // A second initialisation attempt keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_outputs() {
        assert_eq!(map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
        let v: Vec<u32> = (0..10).collect();
        assert_eq!(map_chunks(&v, 4, |c| c.iter().sum::<u32>()), vec![6, 22, 17]);
        assert_eq!(map_slice(&v[..3], |x| x + 1), vec![1, 2, 3]);
    }
}
