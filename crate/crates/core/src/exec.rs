//! Sequential or data-parallel execution of independent work items.
//!
//! Results always come back in input order, so callers that pick "the first"
//! item get the same answer in both modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Uses rayon when the `parallel` feature is on; otherwise sequential.
    #[default]
    Parallel,
}

impl ExecMode {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecMode::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Index of the first item (in input order) for which `f` returns
    /// `Some`, together with that value.
    pub fn find_first<T, R, F>(self, items: &[T], f: F) -> Option<(usize, R)>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Option<R> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecMode::Parallel => items
                .par_iter()
                .enumerate()
                .filter_map(|(i, t)| f(t).map(|r| (i, r)))
                .find_first(|_| true),
            _ => items
                .iter()
                .enumerate()
                .find_map(|(i, t)| f(t).map(|r| (i, r))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u32> = (0..500).collect();
        let sq = |x: &u32| x * x;
        assert_eq!(
            ExecMode::Sequential.map(&items, sq),
            ExecMode::Parallel.map(&items, sq)
        );
        let hit = |x: &u32| (x % 97 == 96).then_some(*x);
        assert_eq!(ExecMode::Sequential.find_first(&items, hit), Some((96, 96)));
        assert_eq!(ExecMode::Parallel.find_first(&items, hit), Some((96, 96)));
    }
}
