//! Execution strategy for the enumeration kernels.
//!
//! With the `parallel` feature (default) the kernels fan out over rayon's
//! global pool; without it, or with [`Strategy::Sequential`], they run on
//! the calling thread. Both paths merge partial results in index order, so
//! outputs never depend on the strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    /// Whether this build can actually run in parallel.
    pub fn effective(self) -> Strategy {
        if cfg!(feature = "parallel") {
            self
        } else {
            Strategy::Sequential
        }
    }
}

/// `(0..len).map(f).collect()`, in order.
pub(crate) fn map_range<T, F>(strategy: Strategy, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match strategy.effective() {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..len).into_par_iter().map(f).collect(),
        _ => (0..len).map(f).collect(),
    }
}

/// `(0..len).map(f).collect()` where each worker reuses one scratch value.
pub(crate) fn map_range_with<T, S, I, F>(strategy: Strategy, len: usize, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
{
    match strategy.effective() {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..len).into_par_iter().map_init(&init, |s, i| f(s, i)).collect(),
        _ => {
            let mut s = init();
            (0..len).map(|i| f(&mut s, i)).collect()
        }
    }
}

/// First index (lowest) satisfying the predicate.
pub(crate) fn find_first<F>(strategy: Strategy, len: usize, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    match strategy.effective() {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => (0..len).into_par_iter().find_first(|&i| pred(i)),
        _ => (0..len).find(|&i| pred(i)),
    }
}

/// Balanced product tree over a non-empty slice using an associative `op`.
pub(crate) fn reduce_tree<T, F>(strategy: Strategy, items: Vec<T>, op: &F) -> Option<T>
where
    T: Send + Sync + Clone,
    F: Fn(&T, &T) -> T + Sync + Send,
{
    if items.is_empty() {
        return None;
    }
    let mut level = items;
    while level.len() > 1 {
        let pairs = level.len() / 2;
        let odd = (level.len() % 2 == 1).then(|| level[level.len() - 1].clone());
        let next_level = map_range(strategy, pairs, |i| op(&level[2 * i], &level[2 * i + 1]));
        level = next_level;
        level.extend(odd);
    }
    level.pop()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for s in [Strategy::Sequential, Strategy::Parallel] {
            assert_eq!(map_range(s, 5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(find_first(s, 100, |i| i > 10 && i % 7 == 0), Some(14));
            assert_eq!(reduce_tree(s, (1..=10u64).collect(), &|a, b| a * b), Some(3628800));
            assert_eq!(reduce_tree(s, Vec::<u64>::new(), &|a, b| a + b), None);
            let v = map_range_with(s, 4, Vec::<usize>::new, |buf, i| {
                buf.clear();
                buf.extend(0..i);
                buf.len()
            });
            assert_eq!(v, vec![0, 1, 2, 3]);
        }
    }
}
