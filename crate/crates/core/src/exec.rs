//! Execution strategy for the exhaustive searches.
//!
//! With the `parallel` feature the index-range helpers fan out over rayon;
//! without it, [`Strategy::Parallel`] silently runs sequentially. Results are
//! identical either way: collection preserves index order and searches
//! return the lowest-index hit.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

/// `(0..n).map(f).collect()`, in index order.
pub fn map_range<R, F>(n: u64, strategy: Strategy, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// `(0..n).filter_map(f).collect()`, in index order.
pub fn filter_map_range<R, F>(n: u64, strategy: Strategy, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..n).into_par_iter().filter_map(f).collect(),
        _ => (0..n).filter_map(f).collect(),
    }
}

/// The result for the smallest index where `f` returns `Some`.
pub fn find_first<R, F>(n: u64, strategy: Strategy, f: F) -> Option<R>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..n).into_par_iter().find_map_first(f),
        _ => (0..n).find_map(f),
    }
}

/// `items.iter().map(f).collect()`, in order.
pub fn map_slice<T, R, F>(items: &[T], strategy: Strategy, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for s in [Strategy::Sequential, Strategy::Parallel] {
            assert_eq!(map_range(5, s, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(filter_map_range(10, s, |i| (i % 3 == 0).then_some(i)), vec![0, 3, 6, 9]);
            assert_eq!(find_first(1000, s, |i| (i > 10 && i % 7 == 0).then_some(i)), Some(14));
            assert_eq!(map_slice(&[1, 2, 3], s, |x| x + 1), vec![2, 3, 4]);
        }
    }
}
