//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel code path in the crate goes through [`Execution`], so the
//! two strategies can be compared (and must agree bit for bit). Without the
//! `parallel` feature, `Execution::Parallel` silently runs sequentially.

/// Work below this many scalar operations is not worth a fork.
pub const PARALLEL_THRESHOLD: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg_attr(feature = "parallel", default)]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Drops to sequential for small jobs.
    pub fn for_work(self, work: usize) -> Self {
        if work < PARALLEL_THRESHOLD {
            Execution::Sequential
        } else {
            self
        }
    }

    /// Calls `f(i, row)` on every `width`-long chunk of `data`.
    pub fn for_each_row<F>(self, data: &mut [u64], width: usize, f: F)
    where
        F: Fn(usize, &mut [u64]) + Sync + Send,
    {
        if width == 0 {
            return;
        }
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                data.par_chunks_mut(width)
                    .enumerate()
                    .for_each(|(i, row)| f(i, row));
            }
            _ => data
                .chunks_mut(width)
                .enumerate()
                .for_each(|(i, row)| f(i, row)),
        }
    }

    /// `(0..len).map(f).collect()`, preserving order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let mut a: Vec<u64> = (0..1000).collect();
        let mut b = a.clone();
        let bump = |i: usize, row: &mut [u64]| row.iter_mut().for_each(|x| *x += i as u64);
        Execution::Sequential.for_each_row(&mut a, 10, bump);
        Execution::Parallel.for_each_row(&mut b, 10, bump);
        assert_eq!(a, b);
        assert_eq!(
            Execution::Sequential.map(50, |i| i * i),
            Execution::Parallel.map(50, |i| i * i)
        );
    }

    #[test]
    fn small_work_runs_sequentially() {
        assert_eq!(Execution::Parallel.for_work(10), Execution::Sequential);
        assert_eq!(
            Execution::Parallel.for_work(PARALLEL_THRESHOLD),
            Execution::Parallel
        );
    }
}
