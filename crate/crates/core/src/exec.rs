//! Execution policy: data-parallel mapping with a sequential fallback.
//!
//! Detectors and kernel quadratures are pure per index, so the only policy
//! decision is how an index range is mapped. With the `parallel` feature
//! (default) the range is split across the rayon pool; without it the same
//! closure runs sequentially, producing byte-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Whether this build maps work in parallel.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_index_order() {
        let out = map_indices(1000, |i| 3 * i);
        assert_eq!(out[0], 0);
        assert_eq!(out[999], 2997);
        assert!(out.windows(2).all(|w| w[0] < w[1]));
    }
}
