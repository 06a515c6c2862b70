//! Data-parallel evaluation of independent law instances.
//!
//! Every suite enumerates its instances by index and hands the index range
//! to [`flat_map_range`]. With the `parallel` feature the range is split
//! across the rayon pool; otherwise (or with [`Exec::Sequential`]) it runs
//! on the calling thread. Output order is the index order in both modes, so
//! reports are byte-identical regardless of the executor.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// `Parallel` when the crate was built with rayon, otherwise `Sequential`.
    pub fn effective(self) -> Exec {
        if cfg!(feature = "parallel") {
            self
        } else {
            Exec::Sequential
        }
    }
}

pub fn flat_map_range<T, F>(exec: Exec, range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Vec<T> + Sync + Send,
{
    match exec.effective() {
        Exec::Sequential => range.flat_map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => range.into_par_iter().flat_map_iter(f).collect(),
        #[cfg(not(feature = "parallel"))]
        Exec::Parallel => unreachable!(),
    }
}

pub fn map_range<T, F>(exec: Exec, range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    flat_map_range(exec, range, |i| vec![f(i)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_executors_agree_on_order() {
        let f = |i: u64| (0..i % 3).map(move |k| i * 10 + k).collect::<Vec<_>>();
        let a = flat_map_range(Exec::Sequential, 0..200, f);
        let b = flat_map_range(Exec::Parallel, 0..200, f);
        assert_eq!(a, b);
    }
}
